"""``python -m wirepack inspect ...`` / ``python -m wirepack bench ...``"""

import sys

USAGE = "usage: wirepack {inspect,bench} [options]   (use '<command> --help' for details)"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(USAGE, file=sys.stderr if not argv else sys.stdout)
        return 2 if not argv else 0
    cmd, rest = argv[0], argv[1:]
    if cmd == "inspect":
        from wirepack.inspector import main as run
    elif cmd == "bench":
        from wirepack.bench import main as run
    else:
        print(f"unknown command {cmd!r}\n{USAGE}", file=sys.stderr)
        return 2
    return run(rest)


if __name__ == "__main__":
    sys.exit(main())
