"""Line-delimited JSON protocol for maps implemented by a child process.

Each request is one line ``{"values": {...}}`` (a function on X) written to the
child's standard input; the reply is one line in the same encoding (a function
on Y) read from its standard output.  One request is in flight per child.
"""

from __future__ import annotations

import json
import os
import select
import subprocess
import threading
import time
from typing import Sequence

from ..codec import SpecError, dec_function, enc_function
from ..funcspace import VectorFunction
from ..lcs import VectorSpaceModel
from ..space import FiniteSpace

DEFAULT_TIMEOUT = 10.0


class ExternalMapError(RuntimeError):
    pass


class ExternalTimeout(ExternalMapError):
    pass


class ExternalDecodeError(ExternalMapError):
    pass


class ExternalDimensionError(ExternalMapError):
    pass


class ExternalMap:
    """Callable ``F -> TF`` backed by a long-lived child process."""

    def __init__(
        self,
        command: Sequence[str],
        codomain: FiniteSpace,
        model: VectorSpaceModel,
        timeout: float = DEFAULT_TIMEOUT,
    ):
        self.command = list(command)
        self.codomain = codomain
        self.model = model
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._buf = b""
        self._lock = threading.Lock()

    def _start(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.DEVNULL,
                )
            except OSError as exc:
                raise ExternalMapError(f"cannot launch {self.command!r}: {exc}") from exc
            self._buf = b""
        return self._proc

    def _readline(self, proc: subprocess.Popen) -> bytes:
        fd = proc.stdout.fileno()
        deadline = time.monotonic() + self.timeout
        while b"\n" not in self._buf:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.close()
                raise ExternalTimeout(f"no reply within {self.timeout} s")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                self.close()
                raise ExternalMapError("child closed its output")
            self._buf += chunk
        line, _, self._buf = self._buf.partition(b"\n")
        return line

    def __call__(self, F: VectorFunction) -> VectorFunction:
        request = json.dumps(enc_function(F), sort_keys=True) + "\n"
        with self._lock:
            proc = self._start()
            try:
                proc.stdin.write(request.encode("utf-8"))
                proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                self.close()
                raise ExternalMapError(f"child is not accepting input: {exc}") from exc
            line = self._readline(proc)
        try:
            obj = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ExternalDecodeError(f"malformed reply: {line[:200]!r}") from exc
        try:
            return dec_function(obj, self.codomain, self.model)
        except SpecError as exc:
            if "dimension" in str(exc):
                raise ExternalDimensionError(str(exc)) from exc
            raise ExternalDecodeError(str(exc)) from exc

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            if proc.stdin:
                proc.stdin.close()
        except OSError:
            pass
        if proc.poll() is None:
            proc.kill()
        proc.wait()
        if proc.stdout:
            proc.stdout.close()

    def __enter__(self) -> "ExternalMap":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __del__(self) -> None:
        try:
            self.close()
        except Exception:
            pass


def run_external_map(
    command: Sequence[str],
    F: VectorFunction,
    codomain: FiniteSpace,
    model: VectorSpaceModel,
    timeout: float = DEFAULT_TIMEOUT,
) -> VectorFunction:
    """One request/reply round trip with a freshly launched child."""
    with ExternalMap(command, codomain, model, timeout) as ext:
        return ext(F)
