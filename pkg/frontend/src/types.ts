/** Wire types, mirroring the service JSON exactly. */

export type RGB = [number, number, number];

export type SectorKind = "Class" | "Individual";

export interface PieSector {
  id: string;
  label: string;
  kind: SectorKind;
  percent: number;
  color: RGB;
  expandable: boolean;
  children: PieSector[];
  source_iri: string;
}

export interface PieModel {
  root: PieSector;
  focus_tags: string[];
  revision: number;
  empty: boolean;
}

export interface ResultTable {
  columns: string[];
  rows: string[][];
  revision: number;
}

export interface TemplateParam {
  label: string;
  type: "class-instance" | "literal-of-type";
  restriction: string;
}

export interface TemplateInfo {
  id: string;
  description: string;
  params: TemplateParam[];
}

export interface PropertyInfo {
  iri: string;
  kind: "ObjectProperty" | "DatatypeProperty";
  range: string;
  domain: string | null;
  min_card: number;
  max_card: number | null;
  family: "Hierarchical" | "TotalOrder" | "Plain";
}

export interface ApiError {
  error_code: string;
  message: string;
  details: Record<string, unknown>;
}

export type AssertionObject = { iri: string } | { value: unknown; dtype: string };
