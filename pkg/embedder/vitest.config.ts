import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // Model loading and ONNX inference dominate; keep headroom.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
