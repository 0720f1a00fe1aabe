import sys

from tridiag_vqls.decomposition import TridiagonalSpec, decompose, dump_decomposition, term_counts
from tridiag_vqls.experiments import depth_report

n = int(sys.argv[1]) if len(sys.argv) > 1 else 3
spec = TridiagonalSpec(n=n, alpha=2.0, beta=-1.0)

for scheme in ("pauli", "multiqubit"):
    d = decompose(spec, scheme)
    print(f"## {scheme}: {len(d)} terms (generic count {term_counts(scheme, n)})")
    print(dump_decomposition(d), end="")
    print(depth_report(spec, scheme).line())
    print()
