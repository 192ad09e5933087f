// Session screen, what-if panel, and graph screen for the guidance service.
//
// The UI is a thin projection of server state: action buttons are created
// one-to-one from the enabled event lists the server returns, every click
// round-trips before the view updates, and a rejected action (409) surfaces
// as a toast followed by a refetch. Deleting everything here except the
// rendering and HTTP calls would not change which actions are offered.

import { ApiError, GuidanceClient, Outlook, SessionView } from "./api.js";

export interface AppOptions {
  whatIfBound?: number;
}

export interface App {
  ready: Promise<void>;
  attempt(event: string): Promise<void>;
  undo(): Promise<void>;
  refresh(): Promise<void>;
  showGraph(): Promise<void>;
  showSession(): void;
  currentView(): SessionView | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

export function mountApp(
  root: HTMLElement,
  client: GuidanceClient,
  options: AppOptions = {},
): App {
  const whatIfBound = options.whatIfBound ?? 24;
  let view: SessionView | null = null;

  root.innerHTML = "";
  const toast = el("div", { id: "toast", class: "toast hidden" });
  const banner = el("div", { id: "banner", class: "banner hidden" });
  const tabs = el("div", { class: "tabs" });
  const sessionTab = el("button", { id: "tab-session", class: "tab active" }, "Assembly");
  const graphTab = el("button", { id: "tab-graph", class: "tab" }, "Graph");
  tabs.append(sessionTab, graphTab);

  const sessionScreen = el("div", { id: "session-screen" });
  const history = el("ol", { id: "history", class: "history" });
  const starts = el("div", { id: "starts", class: "actions" });
  const confirms = el("div", { id: "confirms", class: "actions" });
  const undoButton = el("button", { id: "undo", class: "undo" }, "Undo");
  const whatIf = el("div", { id: "whatif", class: "whatif" });
  sessionScreen.append(
    banner,
    el("h2", {}, "History"),
    history,
    el("h2", {}, "Start a task"),
    starts,
    el("h2", {}, "Confirm a completion"),
    confirms,
    undoButton,
    el("h2", {}, "Flexibility after each choice"),
    whatIf,
  );

  const graphScreen = el("div", { id: "graph-screen", class: "hidden" });
  root.append(tabs, toast, sessionScreen, graphScreen);

  function showToast(message: string): void {
    toast.textContent = message;
    toast.classList.remove("hidden");
  }

  function clearToast(): void {
    toast.classList.add("hidden");
    toast.textContent = "";
  }

  function render(next: SessionView): void {
    view = next;

    history.innerHTML = "";
    for (const event of next.history) {
      history.append(el("li", {}, event));
    }

    starts.innerHTML = "";
    for (const event of next.enabled.controllable) {
      const button = el(
        "button",
        { class: "action start", "data-event": event },
        event.replace(/_start$/, ""),
      );
      button.addEventListener("click", () => void attempt(event));
      starts.append(button);
    }

    confirms.innerHTML = "";
    for (const event of next.enabled.uncontrollable) {
      const button = el(
        "button",
        { class: "action confirm", "data-event": event },
        `${event.replace(/_done$/, "")} finished`,
      );
      button.addEventListener("click", () => void attempt(event));
      confirms.append(button);
    }

    if (next.completed) {
      banner.textContent = "Assembly complete";
      banner.classList.remove("hidden");
    } else {
      banner.textContent = "";
      banner.classList.add("hidden");
    }
  }

  function describe(outlook: Outlook): string {
    if (outlook.remaining_sequence_count !== null) {
      return `${outlook.remaining_sequence_count} ways to finish`;
    }
    return `${outlook.bounded_sequence_count} ways within ${outlook.bound_used} steps`;
  }

  async function renderWhatIf(current: SessionView): Promise<void> {
    whatIf.innerHTML = "";
    for (const event of current.enabled.controllable) {
      const entry = el("div", { class: "whatif-entry", "data-event": event });
      entry.append(el("span", {}, `${event}: `));
      const value = el("span", { class: "count" }, "…");
      entry.append(value);
      whatIf.append(entry);
      try {
        const outlook = await client.outlook(current.id, whatIfBound, event);
        value.textContent = describe(outlook);
      } catch (error) {
        value.textContent = error instanceof ApiError ? error.message : "unavailable";
      }
    }
  }

  async function refresh(): Promise<void> {
    if (!view) return;
    render(await client.getSession(view.id));
    await renderWhatIf(view);
  }

  async function attempt(event: string): Promise<void> {
    if (!view) return;
    try {
      render(await client.step(view.id, event));
      clearToast();
      await renderWhatIf(view);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        render(await client.getSession(view.id));
        await renderWhatIf(view);
        showToast(`Not allowed: ${error.message}`);
      } else {
        throw error;
      }
    }
  }

  async function undo(): Promise<void> {
    if (!view) return;
    try {
      render(await client.undo(view.id));
      clearToast();
      await renderWhatIf(view);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        showToast("Nothing to undo");
      } else {
        throw error;
      }
    }
  }

  async function showGraph(): Promise<void> {
    const info = await client.model(view?.state);
    graphScreen.innerHTML = "";
    graphScreen.append(
      el("h2", {}, `${info.name}: ${info.states} states, ${info.transitions} transitions`),
      el("p", {}, `You are at: ${view?.state ?? info.initial}`),
    );
    // No renderer dependency: show the DOT source and offer it as a download.
    const pre = el("pre", { id: "dot-source" }, info.dot);
    const link = el("a", { id: "dot-download", download: "supervisor.dot" }, "Download DOT");
    link.href = `data:text/vnd.graphviz;charset=utf-8,${encodeURIComponent(info.dot)}`;
    graphScreen.append(link, pre);
    graphScreen.classList.remove("hidden");
    sessionScreen.classList.add("hidden");
    graphTab.classList.add("active");
    sessionTab.classList.remove("active");
  }

  function showSession(): void {
    graphScreen.classList.add("hidden");
    sessionScreen.classList.remove("hidden");
    sessionTab.classList.add("active");
    graphTab.classList.remove("active");
  }

  undoButton.addEventListener("click", () => void undo());
  graphTab.addEventListener("click", () => void showGraph());
  sessionTab.addEventListener("click", () => showSession());

  const ready = (async () => {
    render(await client.createSession());
    await renderWhatIf(view!);
  })();

  return {
    ready,
    attempt,
    undo,
    refresh,
    showGraph,
    showSession,
    currentView: () => view,
  };
}
