export const FN_MARKER = "<fn>";

function unserializable(value: unknown): { $unserializable: string } {
  if (value === undefined) return { $unserializable: "undefined" };
  const ctor = (value as object)?.constructor?.name;
  return { $unserializable: ctor || typeof value };
}

/**
 * Convert one runtime value into its wire form: JSON-shaped data passes
 * through, functions become the "<fn>" marker, and anything the wire
 * cannot carry (cycles, exotic objects, non-finite numbers) becomes a
 * {"$unserializable": typeName} placeholder.
 */
export function serializeValue(value: unknown, seen: Set<object> = new Set()): unknown {
  if (value === null) return null;
  switch (typeof value) {
    case "string":
    case "boolean":
      return value;
    case "number":
      return Number.isFinite(value) ? value : unserializable(value);
    case "function":
      return FN_MARKER;
    case "object":
      break;
    default:
      return unserializable(value);
  }
  const obj = value as object;
  if (seen.has(obj)) return { $unserializable: "circular" };
  if (Array.isArray(obj)) {
    seen.add(obj);
    const out = obj.map((item) => serializeValue(item, seen));
    seen.delete(obj);
    return out;
  }
  if (obj.constructor === Object || obj.constructor === undefined) {
    seen.add(obj);
    const out: Record<string, unknown> = {};
    for (const [key, item] of Object.entries(obj)) {
      out[key] = serializeValue(item, seen);
    }
    seen.delete(obj);
    return out;
  }
  return unserializable(obj);
}

export function serializeArgs(args: readonly unknown[]): unknown[] {
  return args.map((arg) => serializeValue(arg));
}
