import fs from "node:fs";

/**
 * The disciplined variant: every operation on the descriptor starts
 * inside the callback of the previous one.
 */
export function safeWrites(path: string): Promise<void> {
  return new Promise((resolve, reject) => {
    fs.open(path, "w", (err, fd) => {
      if (err) return reject(err);
      fs.write(fd, "Hello world!\n", () => fs.close(fd, () => resolve()));
    });
  });
}

/**
 * The buggy variant: a burst of writes on the same descriptor without
 * waiting for any callback, then a close.
 */
export function unsafeWrites(path: string, limit = 100): Promise<void> {
  return new Promise((resolve, reject) => {
    fs.open(path, "w", (err, fd) => {
      if (err) return reject(err);
      let remaining = limit;
      for (let i = 0; i < limit; i++) {
        fs.write(fd, `${i}\n`, () => {
          remaining--;
          if (remaining === 0) fs.close(fd, () => resolve());
        });
      }
    });
  });
}
