/** Shared fakes for unit tests: plain objects standing in for fetch
 * responses, and a path-keyed router installed as the global fetch. */

import { vi } from "vitest";

export function jsonOk(body: unknown): Response {
  return {
    ok: true,
    status: 200,
    statusText: "OK",
    json: async () => body,
  } as unknown as Response;
}

export function jsonError(status: number, code: string, detail: string): Response {
  return {
    ok: false,
    status,
    statusText: String(status),
    json: async () => ({ error: code, detail }),
  } as unknown as Response;
}

export type RouteHandler = (init?: RequestInit) => Response | Promise<Response>;

/** Stub fetch with per-path handlers; query strings are ignored when
 * matching. Unrouted paths reject like an unreachable server. */
export function routeFetch(handlers: Record<string, RouteHandler>) {
  const mock = vi.fn(async (url: string, init?: RequestInit) => {
    const path = url.split("?")[0];
    const handler = handlers[path];
    if (handler === undefined) throw new TypeError(`fetch failed: no route for ${url}`);
    return handler(init);
  });
  vi.stubGlobal("fetch", mock);
  return mock;
}

export function postedBody(
  mock: ReturnType<typeof routeFetch>,
  path: string,
): Record<string, unknown> {
  const call = mock.mock.calls.find(([url]) => (url as string).startsWith(path));
  if (call === undefined) throw new Error(`no request hit ${path}`);
  return JSON.parse((call[1] as RequestInit).body as string) as Record<string, unknown>;
}
