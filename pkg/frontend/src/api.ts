/** Typed client for the knowledge-base service HTTP API. */

import type {
  ApiError,
  AssertionObject,
  PieModel,
  PieSector,
  PropertyInfo,
  ResultTable,
  TemplateInfo,
} from "./types.js";

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ status: number; text(): Promise<string> }>;

/** Raised for non-2xx responses; carries the service's error body. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiError,
  ) {
    super(`${body.error_code}: ${body.message}`);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async request<T>(
    method: string, path: string, body?: unknown, raw?: string,
  ): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method, headers: {} };
    if (raw !== undefined) {
      init.headers = { "content-type": "application/xml" };
      init.body = raw;
    } else if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.base + path, init);
    const text = await res.text();
    if (res.status < 200 || res.status >= 300) {
      let parsed: ApiError;
      try {
        parsed = JSON.parse(text) as ApiError;
      } catch {
        parsed = { error_code: "Unknown", message: text, details: {} };
      }
      throw new ServiceError(res.status, parsed);
    }
    return (text ? JSON.parse(text) : undefined) as T;
  }

  revision(): Promise<{ revision: number }> {
    return this.request("GET", "/api/revision");
  }

  rootModel(): Promise<PieModel> {
    return this.request("GET", "/api/model/root");
  }

  expand(sectorId: string, orderProperty?: string):
      Promise<{ sector: PieSector; revision: number }> {
    return this.request("POST", "/api/model/expand", {
      sector_id: sectorId,
      order_property: orderProperty ?? null,
    });
  }

  focus(tags: string[], orderProperty?: string): Promise<PieModel> {
    return this.request("POST", "/api/model/focus", {
      tags,
      order_property: orderProperty ?? null,
    });
  }

  defineClass(iri: string, label: string, parents: string[] = []):
      Promise<{ revision: number }> {
    return this.request("POST", "/api/kb/class", { iri, label, parents });
  }

  assertIndividual(iri: string, labels: string[], classes: string[]):
      Promise<{ revision: number }> {
    return this.request("POST", "/api/kb/individual",
      { iri, labels, classes });
  }

  relabel(iri: string, labels: string[]): Promise<{ revision: number }> {
    return this.request("PATCH",
      `/api/kb/individual/${encodeURIComponent(iri)}`, { labels });
  }

  setAssertion(subject: string, property: string, object: AssertionObject):
      Promise<{ revision: number }> {
    return this.request("PUT", "/api/kb/assertion",
      { subject, property, object });
  }

  removeIndividual(iri: string, cascade = false): Promise<{ revision: number }> {
    const flag = cascade ? "?cascade=true" : "";
    return this.request("DELETE",
      `/api/kb/individual/${encodeURIComponent(iri)}${flag}`);
  }

  query(sparql: string): Promise<ResultTable> {
    return this.request("POST", "/api/query", { sparql });
  }

  properties(): Promise<{ properties: PropertyInfo[] }> {
    return this.request("GET", "/api/kb/properties");
  }

  templates(): Promise<{ templates: TemplateInfo[] }> {
    return this.request("GET", "/api/templates");
  }

  runTemplate(id: string, bindings: Record<string, unknown>):
      Promise<ResultTable> {
    return this.request("POST",
      `/api/templates/${encodeURIComponent(id)}/run`, { bindings });
  }

  exportChart(): Promise<string> {
    return this.fetchFn(this.base + "/api/export/piechart")
      .then((r) => r.text());
  }

  importChart(xml: string): Promise<{ slices: number }> {
    return this.request("POST", "/api/import/piechart", undefined, xml);
  }
}
