import { ApiClient } from './api';
import { createApp } from './app';
import './style.css';

const root = document.getElementById('app');
if (!root) {
  throw new Error('missing #app mount point');
}

const app = createApp(root, new ApiClient());
void app.loadScenes().catch((err) => {
  app.store.update({
    banner: { kind: 'error', text: `could not list scenes: ${String(err)}` },
  });
});
