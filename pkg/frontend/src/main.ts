/** Browser entry point: mount the app on #app.
 *
 * The synthesis service origin defaults to same-origin and can be pointed
 * elsewhere with `?api=http://host:port` (the service sends permissive
 * CORS headers, so a separately served UI still works).
 */

import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) throw new Error("index.html must contain <div id=\"app\">");

const api = new URLSearchParams(window.location.search).get("api");
createApp(root, api === null ? {} : { baseUrl: api });
