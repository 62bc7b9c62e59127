import { createRequire } from "node:module";
import path from "node:path";

import { ShimConfig } from "./config";
import { serializeArgs } from "./serialize";

// resolves core and cwd-installed modules whether this file runs as
// CommonJS or through an ESM transform
const nodeRequire = createRequire(path.join(process.cwd(), "noop.js"));

export interface WireEvent {
  event: "func_pre" | "func_post" | "cb_pre" | "cb_post";
  name: string;
  id: number;
  args: unknown[];
  session?: string;
}

export interface MonitorReply {
  status: number;
  error: boolean;
  body: unknown;
}

export class InstallError extends Error {}

export interface ShimHandle {
  /** Restore every wrapped function; calling it again is a no-op. */
  uninstall(): void;
  /** Resolves when every queued event has been posted; rejects with
   *  the first posting failure under failMode "throw". */
  flush(): Promise<void>;
  /** Monitor replies in posting order (strict mode). */
  responses: MonitorReply[];
  /** Posting failures observed so far (failMode "log"). */
  errors: unknown[];
}

// Identifiers increase monotonically for the whole process, so every
// call gets a fresh one no matter how many shims are installed.
let nextCallId = 1;

const WRAPPED = Symbol("tracexp.wrapped");

type AnyFn = (...args: unknown[]) => unknown;
type Container = Record<string, unknown>;

const moduleRegistry = new Map<string, Container>();

/**
 * Make a module object resolvable by name for wrapping; core modules
 * named "fs" or "fs/promises" resolve automatically via require.
 */
export function registerTargetModule(name: string, target: object): void {
  moduleRegistry.set(name, target as Container);
}

function resolveTarget(qualified: string): { container: Container; key: string } {
  const dot = qualified.lastIndexOf(".");
  if (dot <= 0 || dot === qualified.length - 1) {
    throw new InstallError(`not a qualified function name: ${qualified}`);
  }
  const moduleName = qualified.slice(0, dot);
  const key = qualified.slice(dot + 1);
  let container = moduleRegistry.get(moduleName);
  if (!container) {
    try {
      container = nodeRequire(moduleName) as Container;
    } catch {
      throw new InstallError(`cannot resolve module ${moduleName} for ${qualified}`);
    }
  }
  return { container, key };
}

function lastFunctionIndex(args: readonly unknown[]): number {
  for (let i = args.length - 1; i >= 0; i--) {
    if (typeof args[i] === "function") return i;
  }
  return -1;
}

class EventQueue {
  private chain: Promise<void> = Promise.resolve();
  private pending: Promise<void>[] = [];
  private failure: unknown = null;

  constructor(
    private readonly config: ShimConfig,
    readonly responses: MonitorReply[],
    readonly errors: unknown[],
  ) {}

  enqueue(event: WireEvent): void {
    if (this.config.session) event.session = this.config.session;
    const send = async () => {
      try {
        const resp = await fetch(this.config.monitorUrl, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(event),
        });
        const body = (await resp.json()) as { error?: boolean };
        this.responses.push({ status: resp.status, error: body.error === true, body });
      } catch (err) {
        if (this.config.failMode === "throw") {
          if (this.failure === null) this.failure = err;
        } else {
          this.errors.push(err);
          // eslint-disable-next-line no-console
          console.error(`tracexp shim: failed to post ${event.event} #${event.id}:`, err);
        }
      }
    };
    // one FIFO outbound queue; strict mode also awaits each reply
    // before the next event leaves the process
    if (this.config.strict === false) {
      this.chain = this.chain.then(() => {
        this.pending.push(send());
      });
    } else {
      this.chain = this.chain.then(send);
    }
  }

  async flush(): Promise<void> {
    await this.chain;
    await Promise.all(this.pending);
    this.pending = [];
    if (this.failure !== null) {
      const err = this.failure;
      this.failure = null;
      throw err;
    }
  }
}

/**
 * Wrap every configured function with an event-emitting proxy.
 *
 * Each call allocates a fresh identifier, posts func_pre, replaces the
 * last function-typed argument (if any) with a wrapper that posts
 * cb_pre/cb_post around the original callback, invokes the real
 * function, and posts func_post.  Return values and callback arguments
 * pass through untouched.
 */
export function install(config: ShimConfig, targets?: Record<string, object>): ShimHandle {
  if (targets) {
    for (const [name, target] of Object.entries(targets)) {
      registerTargetModule(name, target);
    }
  }
  const responses: MonitorReply[] = [];
  const errors: unknown[] = [];
  const queue = new EventQueue(config, responses, errors);
  const restorers: Array<() => void> = [];

  const post = (event: "func_pre" | "func_post" | "cb_pre" | "cb_post",
                name: string, id: number, args: readonly unknown[]) => {
    queue.enqueue({ event, name, id, args: serializeArgs(args) });
  };

  try {
    for (const qualified of config.wrapped) {
      const { container, key } = resolveTarget(qualified);
      const original = container[key];
      if (typeof original !== "function") {
        throw new InstallError(`${qualified} does not resolve to a function`);
      }
      if ((original as { [WRAPPED]?: boolean })[WRAPPED]) {
        throw new InstallError(`${qualified} is already wrapped`);
      }
      const proxy = function (this: unknown, ...args: unknown[]): unknown {
        const id = nextCallId++;
        post("func_pre", qualified, id, args);
        let callArgs = args;
        const cbIndex = lastFunctionIndex(args);
        if (cbIndex >= 0) {
          const userCb = args[cbIndex] as AnyFn;
          const cbName = userCb.name || `<anonymous>@${qualified}`;
          callArgs = args.slice();
          callArgs[cbIndex] = function (this: unknown, ...cbArgs: unknown[]): unknown {
            post("cb_pre", cbName, id, cbArgs);
            try {
              return userCb.apply(this, cbArgs);
            } finally {
              post("cb_post", cbName, id, cbArgs);
            }
          };
        }
        try {
          return (original as AnyFn).apply(this, callArgs);
        } finally {
          post("func_post", qualified, id, args);
        }
      };
      (proxy as unknown as { [WRAPPED]: boolean })[WRAPPED] = true;
      container[key] = proxy;
      restorers.push(() => {
        if (container[key] === proxy) container[key] = original;
      });
    }
  } catch (err) {
    for (const restore of restorers.reverse()) restore();
    throw err;
  }

  let installed = true;
  return {
    responses,
    errors,
    uninstall() {
      if (!installed) return;
      installed = false;
      for (const restore of restorers.reverse()) restore();
    },
    flush: () => queue.flush(),
  };
}
