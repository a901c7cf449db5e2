/**
 * Test helpers: a recording fetch stub.
 *
 * Routes are matched by "METHOD /path" prefix; each handler returns a
 * status and JSON body. Every request is recorded so tests can assert not
 * just on what a view rendered but on exactly which calls it issued.
 */

import type { FetchLike } from "../src/api.js";

export interface RecordedRequest {
  method: string;
  url: string;
  body: unknown;
}

export type RouteHandler = (request: RecordedRequest) => { status: number; body: unknown };

export interface FetchStub {
  fetch: FetchLike;
  requests: RecordedRequest[];
  ofMethod(method: string): RecordedRequest[];
}

export function stubFetch(routes: Record<string, RouteHandler>): FetchStub {
  const requests: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    const recorded: RecordedRequest = { method, url, body };
    requests.push(recorded);
    const path = url.split("?")[0] ?? url;
    const handler =
      routes[`${method} ${url}`] ?? routes[`${method} ${path}`] ?? routes[method];
    if (!handler) {
      return jsonResponse(500, {
        code: "unrouted",
        message: `no stub for ${method} ${url}`,
        path,
      });
    }
    const { status, body: responseBody } = handler(recorded);
    return jsonResponse(status, responseBody);
  };
  return {
    fetch: fetchFn,
    requests,
    ofMethod: (method: string) => requests.filter((request) => request.method === method),
  };
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
