export { loadConfig } from "./config";
export type { FailMode, ShimConfig } from "./config";
export { serializeArgs, serializeValue, FN_MARKER } from "./serialize";
export { install, registerTargetModule, InstallError } from "./shim";
export type { MonitorReply, ShimHandle, WireEvent } from "./shim";
