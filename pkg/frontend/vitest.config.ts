import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: ["./tests/globalSetup.ts"],
    environment: "node",
    testTimeout: 30000,
    hookTimeout: 120000,
  },
});
