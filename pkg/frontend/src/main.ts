// Browser entry point. All behavior lives in App; this file only wires the
// page's real video element, localStorage, and query-string configuration.
import { ApiClient } from "./api.js";
import { App } from "./app.js";

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("service") ?? "");

  let projectId = params.get("project");
  if (projectId === null) {
    const created = await api.createProject(params.get("video") ?? "local://video");
    projectId = created.id;
    const url = new URL(window.location.href);
    url.searchParams.set("project", projectId);
    window.history.replaceState(null, "", url.toString());
  }

  const video = document.querySelector<HTMLVideoElement>("#adkit-video");
  if (video === null) throw new Error("page is missing the #adkit-video element");
  const src = params.get("video");
  if (src !== null) video.src = src;

  const root = document.querySelector<HTMLElement>("#adkit-root") ?? document.body;
  const app = new App({
    doc: document,
    api,
    media: video,
    projectId,
    storage: window.localStorage,
    exportSource: params.get("exportSource") ?? undefined,
    exportOut: params.get("exportOut") ?? undefined,
    root,
  });
  await app.boot();
}

void start();
