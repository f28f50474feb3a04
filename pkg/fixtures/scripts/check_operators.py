"""Verify the generated operator library against the translator's analyses:
every operator body must be aggregable, and every operator call must be
recognized as an intrinsic.  Exits nonzero on the first violation."""

import sys

from jvm2boogie.classfile import parse_class, parse_descriptor
from jvm2boogie.contracts import SpecNamespace, check_aggregable
from jvm2boogie.lift import infer_expected_types, simulate_stack


def main(path: str) -> int:
    with open(path, "rb") as fh:
        cf = parse_class(fh.read())
    ns = SpecNamespace()
    failures = 0
    for m in cf.methods:
        if m.code is None:
            continue
        body = infer_expected_types(simulate_stack(m.code, m, cf.this_class))
        if parse_descriptor(m.descriptor)[1] == "V":
            violations = [v for v in check_aggregable(body, ns, lambda *a: False)
                          if v.code != "BAD_SHAPE"]  # void bodies end in bare return
        else:
            violations = check_aggregable(body, ns, lambda *a: False)
        if violations:
            print("NOT AGGREGABLE: %s%s %s" % (m.name, m.descriptor, violations))
            failures += 1
        key = (cf.this_class, m.name, m.descriptor)
        if key not in ns.operators:
            print("NOT AN INTRINSIC: %s%s" % (m.name, m.descriptor))
            failures += 1
    print("checked %d operator bodies, %d failures" % (len(cf.methods), failures))
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
