/** Browser entry: boot the console against the configured service URL. */

import { ApiClient } from "./api";
import { createApp } from "./app";

declare global {
  interface Window {
    RXGUARD_API?: string;
  }
}

const base = window.RXGUARD_API ?? "http://127.0.0.1:8000";
document.getElementById("service-url")!.textContent = base;

const app = createApp(document, new ApiClient(base, (url, init) => fetch(url, init)));
void app.init();
