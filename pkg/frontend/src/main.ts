import { Editor } from './editor.js';
import { ProtocolClient } from './protocol.js';
import { WebSocketTransport } from './transport.js';
import { EditorApp } from './ui.js';

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const url = params.get('service') ?? 'ws://127.0.0.1:8128';
  const transport = await WebSocketTransport.connect(url);
  const editor = new Editor(new ProtocolClient(transport));
  await editor.connect();
  const app = new EditorApp(editor, document.body);
  app.renderAll();
}

window.onload = () => {
  void boot().catch((err) => {
    const status = document.querySelector('#status');
    if (status) status.textContent = String(err);
  });
};
