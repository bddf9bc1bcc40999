import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  ApiError,
  clearToken,
  fetchReport,
  getToken,
  setToken,
  submitQuery,
} from "../src/api.js";

describe("token storage", () => {
  it("round-trips through sessionStorage", () => {
    setToken("abc123");
    expect(getToken()).toBe("abc123");
    clearToken();
    expect(getToken()).toBeNull();
  });
});

describe("apiFetch behavior", () => {
  let fetchMock: ReturnType<typeof vi.fn>;

  beforeEach(() => {
    fetchMock = vi.fn();
    vi.stubGlobal("fetch", fetchMock);
    setToken("tok");
  });

  afterEach(() => {
    vi.unstubAllGlobals();
    clearToken();
  });

  it("attaches the bearer token", async () => {
    fetchMock.mockResolvedValue(
      new Response(JSON.stringify({ queries: { total: 0, users: 0 } }), {
        status: 200,
      }),
    );
    await fetchReport();
    const headers = new Headers(fetchMock.mock.calls[0][1].headers);
    expect(headers.get("Authorization")).toBe("Bearer tok");
  });

  it("raises ApiError with the server's code and message", async () => {
    fetchMock.mockResolvedValue(
      new Response(
        JSON.stringify({ code: "forbidden", message: "instructor role required" }),
        { status: 403 },
      ),
    );
    await expect(
      submitQuery({ language: "", code: "", error: "", issue: "" }),
    ).rejects.toMatchObject({
      status: 403,
      code: "forbidden",
      message: "instructor role required",
    });
    const err = await submitQuery({
      language: "",
      code: "",
      error: "",
      issue: "",
    }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
  });
});
