import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { safeWrites, unsafeWrites } from "../programs/workloads";
import { FN_MARKER, InstallError, ShimConfig, ShimHandle, install, serializeValue } from "../src";
import { CapturedEvent, FakeMonitor, startFakeMonitor } from "./fake-monitor";

const FS_WRAPPED = ["fs.open", "fs.write", "fs.close"];

let monitor: FakeMonitor;
let handle: ShimHandle | null = null;
let tmpdir: string;

function config(extra: Partial<ShimConfig> = {}): ShimConfig {
  return { monitorUrl: monitor.url, wrapped: FS_WRAPPED, failMode: "throw", ...extra };
}

beforeEach(async () => {
  monitor = await startFakeMonitor();
  tmpdir = fs.mkdtempSync(path.join(os.tmpdir(), "shim-test-"));
});

afterEach(async () => {
  handle?.uninstall();
  handle = null;
  await monitor.close();
  fs.rmSync(tmpdir, { recursive: true, force: true });
});

function byKind(events: CapturedEvent[], kind: string): CapturedEvent[] {
  return events.filter((e) => e.event === kind);
}

describe("serialization", () => {
  it("passes JSON values through and marks functions", () => {
    expect(serializeValue(["tmp.txt", "w", 9, null, true])).toEqual(["tmp.txt", "w", 9, null, true]);
    expect(serializeValue(() => 0)).toBe(FN_MARKER);
    expect(serializeValue({ a: [1, () => 0] })).toEqual({ a: [1, FN_MARKER] });
  });

  it("marks unserializable values with their type name", () => {
    const cyclic: Record<string, unknown> = {};
    cyclic.self = cyclic;
    expect(serializeValue(cyclic)).toEqual({ self: { $unserializable: "circular" } });
    expect(serializeValue(Buffer.from("x"))).toEqual({ $unserializable: "Buffer" });
    expect(serializeValue(undefined)).toEqual({ $unserializable: "undefined" });
    expect(serializeValue(Infinity)).toEqual({ $unserializable: "Number" });
  });
});

describe("install/uninstall", () => {
  it("reports unknown names", () => {
    expect(() => install(config({ wrapped: ["fs.noSuchFunction"] }))).toThrow(InstallError);
    expect(() => install(config({ wrapped: ["bare-name"] }))).toThrow(InstallError);
  });

  it("refuses double wrapping and rolls back cleanly", () => {
    handle = install(config());
    expect(() => install(config())).toThrow(/already wrapped/);
    handle.uninstall();
    // rollback of the failed second install must not have clobbered
    // the first installation's restoration
    expect((fs.open as { name?: string }).name).toBe("open");
  });

  it("uninstall restores originals and is idempotent", async () => {
    const original = fs.open;
    handle = install(config());
    expect(fs.open).not.toBe(original);
    handle.uninstall();
    expect(fs.open).toBe(original);
    handle.uninstall();
    expect(fs.open).toBe(original);
    // events posted before uninstall are not retracted
    const wrapped = install(config());
    await safeWrites(path.join(tmpdir, "before.txt"));
    await wrapped.flush();
    const posted = monitor.events.length;
    wrapped.uninstall();
    await safeWrites(path.join(tmpdir, "after.txt"));
    await wrapped.flush();
    expect(monitor.events.length).toBe(posted);
  });
});

describe("transparency", () => {
  it("wrapped functions behave like the originals", async () => {
    handle = install(config());
    const file = path.join(tmpdir, "hello.txt");
    const cbArgs = await new Promise<unknown[]>((resolve, reject) => {
      fs.open(file, "w", (...args: unknown[]) => {
        const [err, fd] = args as [NodeJS.ErrnoException | null, number];
        if (err) return reject(err);
        fs.write(fd, "Hello world!\n", () =>
          fs.close(fd, () => resolve(args)),
        );
      });
    });
    expect(cbArgs[0]).toBeNull();
    expect(typeof cbArgs[1]).toBe("number");
    await handle.flush();
    expect(fs.readFileSync(file, "utf-8")).toBe("Hello world!\n");
  });
});

describe("event stream", () => {
  it("couples callbacks to calls by identifier", async () => {
    handle = install(config());
    await safeWrites(path.join(tmpdir, "safe.txt"));
    await handle.flush();
    const events = monitor.events;
    const preIds = byKind(events, "func_pre").map((e) => e.id);
    expect(preIds).toEqual([...preIds].sort((a, b) => a - b));
    expect(new Set(preIds).size).toBe(preIds.length);
    for (const cb of byKind(events, "cb_pre")) {
      const earlier = events.slice(0, events.indexOf(cb));
      expect(
        earlier.some((e) => e.event === "func_pre" && e.id === cb.id),
      ).toBe(true);
    }
    // at most one pre/post pair of each flavor per identifier
    for (const kind of ["func_pre", "func_post", "cb_pre", "cb_post"]) {
      const ids = byKind(events, kind).map((e) => e.id);
      expect(new Set(ids).size).toBe(ids.length);
    }
  });

  it("emits the nested-callback order for the safe program", async () => {
    handle = install(config());
    await safeWrites(path.join(tmpdir, "order.txt"));
    await handle.flush();
    const names = monitor.events.map((e) => `${e.event}:${e.name.split("@")[0]}`);
    expect(names.slice(0, 2)).toEqual(["func_pre:fs.open", "func_post:fs.open"]);
    const condensed = monitor.events.map((e) => e.event);
    expect(condensed.indexOf("cb_pre")).toBeLessThan(condensed.indexOf("func_pre", 1));
  });

  it("a double write appears as two func_pre on one descriptor with no cb_pre between", async () => {
    handle = install(config());
    await unsafeWrites(path.join(tmpdir, "unsafe.txt"), 2);
    await handle.flush();
    const events = monitor.events;
    const writes = events.filter((e) => e.event === "func_pre" && e.name === "fs.write");
    expect(writes.length).toBe(2);
    expect((writes[0].args as unknown[])[0]).toBe((writes[1].args as unknown[])[0]);
    const between = events.slice(
      events.indexOf(writes[0]) + 1,
      events.indexOf(writes[1]),
    );
    expect(between.every((e) => e.event !== "cb_pre")).toBe(true);
  });

  it("functions without a callback argument emit only func_pre/func_post", async () => {
    const target = {
      add(a: number, b: number): number {
        return a + b;
      },
    };
    handle = install(config({ wrapped: ["calc.add"] }), { calc: target });
    expect(target.add(2, 3)).toBe(5);
    await handle.flush();
    expect(monitor.events.map((e) => e.event)).toEqual(["func_pre", "func_post"]);
    expect(monitor.events[0].args).toEqual([2, 3]);
  });

  it("serializes the callback argument as the function marker", async () => {
    handle = install(config());
    await safeWrites(path.join(tmpdir, "marker.txt"));
    await handle.flush();
    const open = monitor.events.find((e) => e.event === "func_pre" && e.name === "fs.open");
    expect(open).toBeDefined();
    expect((open!.args as unknown[]).at(-1)).toBe(FN_MARKER);
  });

  it("includes the configured session on every event", async () => {
    handle = install(config({ session: "s1" }));
    await safeWrites(path.join(tmpdir, "session.txt"));
    await handle.flush();
    expect(monitor.events.every((e) => e.session === "s1")).toBe(true);
  });
});

describe("ordering and failure handling", () => {
  it("strict mode delivers events in emission order despite slow replies", async () => {
    await monitor.close();
    monitor = await startFakeMonitor(() => false, 5);
    handle = install(config());
    await unsafeWrites(path.join(tmpdir, "burst.txt"), 5);
    await handle.flush();
    const ids = monitor.events
      .filter((e) => e.event === "func_pre")
      .map((e) => e.id);
    expect(ids).toEqual([...ids].sort((a, b) => a - b));
    expect(handle.responses.length).toBe(monitor.events.length);
  });

  it("failMode=throw surfaces posting failures from flush", async () => {
    handle = install(
      config({ monitorUrl: "http://127.0.0.1:9/", wrapped: ["fs.open", "fs.close"] }),
    );
    await safeWrites(path.join(tmpdir, "down.txt"));
    await expect(handle.flush()).rejects.toBeTruthy();
  });

  it("failMode=log records failures without crashing the host", async () => {
    handle = install(
      config({
        monitorUrl: "http://127.0.0.1:9/",
        failMode: "log",
        wrapped: ["fs.open", "fs.close"],
      }),
    );
    await safeWrites(path.join(tmpdir, "logged.txt"));
    await handle.flush();
    expect(handle.errors.length).toBeGreaterThan(0);
  });
});
