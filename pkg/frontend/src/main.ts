import { LineBuffer, RpcClient, type Transport } from "./client.js";
import { InfoView } from "./viewmodel.js";

/** Transport over a WebSocket bridge that forwards newline-delimited JSON
 * to a `microproof serve` process. */
class WsTransport implements Transport {
  private lineCb: (line: string) => void = () => {};
  private closeCb: () => void = () => {};

  constructor(private ws: WebSocket) {
    const lines = new LineBuffer((line) => this.lineCb(line));
    ws.onmessage = (ev) => lines.push(String(ev.data));
    ws.onclose = () => this.closeCb();
  }

  send(line: string): void {
    this.ws.send(line);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  close(): void {
    this.ws.close();
  }
}

/** Browser entry point: `index.html?server=host:port` connects to a
 * WebSocket bridge at that address and wires the editor pane to the
 * goal pane. */
export async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server") ?? "127.0.0.1:8787";
  const ws = new WebSocket(`ws://${server}`);
  await new Promise<void>((resolve, reject) => {
    ws.onopen = () => resolve();
    ws.onerror = () => reject(new Error(`cannot reach ${server}`));
  });
  const client = new RpcClient(new WsTransport(ws));
  const view = new InfoView(client, "untitled.mpl");

  const editor = document.getElementById("editor") as HTMLTextAreaElement;
  const pane = document.getElementById("goal-pane") as HTMLElement;

  const refresh = async () => {
    const before = editor.value.slice(0, editor.selectionStart);
    const line = before.split("\n").length;
    const col = before.length - before.lastIndexOf("\n");
    await view.goalState(line, col);
    pane.innerHTML = view.renderPane();
  };

  editor.addEventListener("input", async () => {
    if (view.revision === 0) await view.open(editor.value);
    else await view.change(editor.value);
    await refresh();
  });
  editor.addEventListener("selectionchange", refresh);
}

if (typeof window !== "undefined" && document.getElementById("editor")) {
  void start();
}
