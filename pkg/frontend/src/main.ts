import { ApiClient } from "./api.js";
import { App } from "./app.js";

declare global {
  interface Window {
    RULEGRID_API?: string;
  }
}

// base URL: ?api=... wins, then window.RULEGRID_API, then same origin
const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? window.RULEGRID_API ?? "";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app container");
}
void new App(root, new ApiClient(base)).start();
