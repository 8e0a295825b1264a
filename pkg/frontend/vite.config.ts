import { defineConfig } from "vitest/config";

export default defineConfig({
  build: {
    outDir: "dist",
    target: "es2020",
  },
  test: {
    environment: "jsdom",
    // The round-trip test boots the Python service and polls for it.
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
