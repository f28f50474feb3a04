"""Command-line driver.

Loads entry classes and their closure from the class path, translates them
to one Boogie file, and optionally hands the result to an external verifier.

Exit codes: 0 success, 1 translation error, 2 specification error,
3 I/O or configuration error, 4 external verifier failure.
"""

from __future__ import annotations

import argparse
import os
import shlex
import subprocess
import sys
import tempfile
import zipfile
from dataclasses import dataclass

from . import __version__
from .boogie import print_program
from .classfile import ClassFile, parse_class
from .contracts import DEFAULT_NAMESPACE, SpecNamespace
from .encode import Encoder
from .errors import (
    ClassFileError,
    ConfigError,
    SpecificationError,
    ToolError,
    TranslationError,
)


@dataclass
class RunConfig:
    classpath: list[str]
    classes: list[str]
    output: str
    prelude: str | None = None
    namespace: str = DEFAULT_NAMESPACE
    check: str | None = None
    verbose: bool = False


EXIT_OK = 0
EXIT_TRANSLATION = 1
EXIT_SPECIFICATION = 2
EXIT_CONFIG = 3
EXIT_CHECK_FAILED = 4


class ClassPath:
    """Directories and .jar/.zip archives searched for classfiles."""

    def __init__(self, roots: list[str]):
        self.roots = []
        for root in roots:
            if os.path.isdir(root):
                self.roots.append(("dir", root))
            elif os.path.isfile(root) and root.endswith((".jar", ".zip")):
                self.roots.append(("zip", root))
            else:
                raise ConfigError("E_CLASSPATH", "no such class path root: %s" % root)

    def load(self, class_name: str) -> bytes | None:
        rel = class_name.replace(".", "/") + ".class"
        for kind, root in self.roots:
            if kind == "dir":
                path = os.path.join(root, *rel.split("/"))
                if os.path.isfile(path):
                    with open(path, "rb") as fh:
                        return fh.read()
            else:
                with zipfile.ZipFile(root) as zf:
                    try:
                        return zf.read(rel)
                    except KeyError:
                        continue
        return None


def _referenced_classes(cf: ClassFile) -> set[str]:
    """Classes reachable from one classfile via calls, field accesses,
    allocations and the superclass chain."""
    out: set[str] = set()
    if cf.super_class:
        out.add(cf.super_class)
    out.update(cf.interfaces)
    for m in cf.methods:
        if m.code is None:
            continue
        for ins in m.code.instructions:
            mn = ins.mnemonic
            if mn in ("getstatic", "putstatic", "getfield", "putfield",
                      "invokevirtual", "invokespecial", "invokestatic",
                      "invokeinterface"):
                out.add(ins.operands[0][0])
            elif mn == "new":
                out.add(ins.operands[0])
    return {name for name in out if not name.startswith("[")}


def load_closure(cp: ClassPath, entries: list[str], ns: SpecNamespace) -> dict[str, ClassFile]:
    classes: dict[str, ClassFile] = {}
    missing_entries = []
    work = list(entries)
    requested = set(entries)
    while work:
        name = work.pop()
        if name in classes:
            continue
        data = cp.load(name)
        if data is None:
            if name in requested:
                missing_entries.append(name)
            continue  # unreachable externals become bodiless stubs
        cf = parse_class(data)
        classes[cf.this_class] = cf
        for ref in sorted(_referenced_classes(cf)):
            if ref not in classes and not ns.is_intrinsic_owner(ref) \
                    and not ref.startswith(ns.prefix + "."):
                work.append(ref)
    if missing_entries:
        raise ConfigError("E_NO_ENTRY",
                          "entry class not found on class path: %s"
                          % ", ".join(sorted(missing_entries)))
    return classes


def run(cfg: RunConfig) -> int:
    try:
        if not cfg.classes:
            raise ConfigError("E_NO_ENTRY", "at least one --class is required")
        cp = ClassPath(cfg.classpath)
        ns = SpecNamespace(cfg.namespace)
        prelude_text = None
        if cfg.prelude is not None:
            try:
                with open(cfg.prelude, "r", encoding="utf-8") as fh:
                    prelude_text = fh.read()
            except OSError as exc:
                raise ConfigError("E_PRELUDE_IO", "cannot read prelude: %s" % exc)
        classes = load_closure(cp, cfg.classes, ns)
        encoder = Encoder(classes, ns, prelude_text)
        program, frames = encoder.translate_program()
        text = print_program(program)
        _atomic_write(cfg.output, text)
        if cfg.verbose:
            for name in sorted(frames):
                print("frame %s = %s" % (name, frames[name].value), file=sys.stderr)
    except ClassFileError as exc:
        print("error%s" % exc, file=sys.stderr)
        return EXIT_TRANSLATION
    except SpecificationError as exc:
        print("error%s" % exc, file=sys.stderr)
        return EXIT_SPECIFICATION
    except TranslationError as exc:
        print("error%s" % exc, file=sys.stderr)
        return EXIT_TRANSLATION
    except ConfigError as exc:
        print("error%s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except ToolError as exc:
        print("error%s" % exc, file=sys.stderr)
        return EXIT_TRANSLATION
    except OSError as exc:
        print("error[E_IO] %s" % exc, file=sys.stderr)
        return EXIT_CONFIG

    if cfg.check:
        command = shlex.split(cfg.check) + [cfg.output]
        try:
            proc = subprocess.run(command, capture_output=True, text=True)
        except OSError as exc:
            print("error[E_CHECK_IO] cannot run %r: %s" % (cfg.check, exc),
                  file=sys.stderr)
            return EXIT_CONFIG
        sys.stderr.write(proc.stderr)
        sys.stdout.write(proc.stdout)
        if proc.returncode != 0:
            return EXIT_CHECK_FAILED
    return EXIT_OK


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise ConfigError("E_OUTPUT", "output directory does not exist: %s" % directory)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jvm2boogie",
        description="Translate contract-annotated JVM classfiles into Boogie")
    parser.add_argument("--classpath", action="append", default=[],
                        metavar="PATH", help="class path root (directory or jar); repeatable")
    parser.add_argument("--class", dest="classes", action="append", default=[],
                        metavar="FQNAME", help="entry class; repeatable")
    parser.add_argument("--output", required=False, default="out.bpl",
                        metavar="FILE", help="Boogie output file")
    parser.add_argument("--prelude", default=None, metavar="FILE",
                        help="override the built-in prelude template")
    parser.add_argument("--namespace", default=DEFAULT_NAMESPACE, metavar="PREFIX",
                        help="package prefix of the contract annotation library")
    parser.add_argument("--check", default=None, metavar="COMMAND",
                        help="external verifier command to run on the output")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--version", action="version",
                        version="jvm2boogie %s" % __version__)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    cfg = RunConfig(classpath=args.classpath, classes=args.classes,
                    output=args.output, prelude=args.prelude,
                    namespace=args.namespace, check=args.check,
                    verbose=args.verbose)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
