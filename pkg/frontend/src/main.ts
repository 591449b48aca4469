import './style.css';
import { ApiClient } from './api';
import { TutorApp } from './ui';

// Server base URL: ?api=http://host:port beats the build-time default,
// which falls back to same-origin.
const params = new URLSearchParams(window.location.search);
const baseUrl = params.get('api') ?? import.meta.env.VITE_API_BASE ?? '';

const root = document.getElementById('app');
if (!root) throw new Error('missing #app container');

const app = new TutorApp(root, new ApiClient(baseUrl));
void app.init();
