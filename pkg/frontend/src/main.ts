import { GuidanceClient } from "./api.js";
import { mountApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? `${window.location.protocol}//${window.location.hostname}:8000`;

const root = document.getElementById("app");
if (root) {
  mountApp(root, new GuidanceClient(base));
}
