import { defineConfig } from "vite";

// The app is served statically by the workbench process, which also hosts
// /api; during development the dev server proxies to a local instance.
export default defineConfig({
  build: { outDir: "dist", sourcemap: false },
  server: { proxy: { "/api": "http://127.0.0.1:8000" } },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
  },
});
