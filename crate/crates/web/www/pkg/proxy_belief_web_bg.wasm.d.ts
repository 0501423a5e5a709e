/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const elicit_report: (a: number, b: number) => [number, number];
export const identify_2x2: (a: number, b: number, c: number, d: number) => [number, number];
export const state_weights_2: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
