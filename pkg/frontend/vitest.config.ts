import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    // The scenario suite spawns the Python service once; keep files
    // sequential so only one server lifecycle is active at a time.
    fileParallelism: false,
  },
});
