import { readFileSync } from "node:fs";

export type FailMode = "log" | "throw";

export interface ShimConfig {
  /** Base URL of the monitoring service, e.g. http://127.0.0.1:8080 */
  monitorUrl: string;
  /** Session name sent with every event; the service default otherwise. */
  session?: string;
  /** Qualified names of the functions to wrap, e.g. "fs.open". */
  wrapped: string[];
  /** log (default): report monitor failures and keep the host running;
   *  throw: surface them from flush(), for tests. */
  failMode?: FailMode;
  /** Await each monitor response before sending the next event
   *  (default true); otherwise sends are only initiated in order. */
  strict?: boolean;
}

/**
 * Read a config from a JSON file and/or the environment; MONITOR_URL
 * and MONITOR_SESSION override the file.
 */
export function loadConfig(path?: string): ShimConfig {
  let base: Partial<ShimConfig> = {};
  if (path) {
    base = JSON.parse(readFileSync(path, "utf-8")) as Partial<ShimConfig>;
  }
  const monitorUrl = process.env.MONITOR_URL ?? base.monitorUrl;
  if (!monitorUrl) {
    throw new Error("monitorUrl missing: set it in the config file or MONITOR_URL");
  }
  return {
    monitorUrl,
    session: process.env.MONITOR_SESSION ?? base.session,
    wrapped: base.wrapped ?? [],
    failMode: base.failMode ?? "log",
    strict: base.strict ?? true,
  };
}
