import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the e2e file trains a model before serving; generous ceiling
    testTimeout: 20000,
    hookTimeout: 180000,
  },
});
