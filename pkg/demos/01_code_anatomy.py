"""Anatomy of the subsystem codes: triangles, stabilizers, gauge, logicals.

Builds the toric and planar variants, walks through the operator content
of one plaquette, validates the whole group structure, and runs the
brute-force distance oracle on the smallest instances.
"""

from sscsim import build, distance_bruteforce, validate_code

# ---------------------------------------------------------------------------
# A lattice of size L has qubits on vertices and edge midpoints.  Every
# plaquette carries four 3-qubit triangle operators; the X-type pair
# multiplies to the weight-6 X stabilizer, the Z-type pair to the Z one.

code = build(3, "toric")
layout = code.layout
n = layout.n_qubits
print(f"toric L=3: {n} qubits, {len(code.triangles)} triangles")

for kind in ("SW", "NE", "SE", "NW"):
    t = code.triangle(1, 1, kind)
    print(f"  {kind} triangle at plaquette (1,1): {t.operator(n)}")

sx = code.groups.stabilizers_x[layout.plaquette(1, 1)]
sz = code.groups.stabilizers_z[layout.plaquette(1, 1)]
print(f"  product of the X pair = {sx}   (weight {sx.weight})")
print(f"  product of the Z pair = {sz}   (weight {sz.weight})")

# The SW/SE pair of each plaquette is kept as that plaquette's gauge
# qubit: a local encoded qubit deliberately carrying no information.
xbar = code.groups.gauge_x[4]
zbar = code.groups.gauge_z[4]
print(f"  gauge pair anticommute: {not xbar.commutes(zbar)}")

# Logical operators are the non-contractible strings.
for name, op in (("X1", code.groups.logical_x[0]), ("Z1", code.groups.logical_z[0])):
    print(f"  logical {name}: weight {op.weight}")

# ---------------------------------------------------------------------------
# Structural validation checks commutation, GF(2) ranks and derived counts.

for geometry in ("toric", "planar"):
    for L in (2, 3, 4):
        report = validate_code(build(L, geometry))
        c = report.counts
        print(
            f"{geometry} L={L}: n={c['n']} s={c['s']} gauge qubits={c['g']} "
            f"logical qubits={c['k']} validation={'ok' if report.passed else report.failures}"
        )

# ---------------------------------------------------------------------------
# Exhaustive distance at L=2.  The torus gives d = L; the open lattice has
# an extra disjoint logical string per direction and comes out at L + 1.

for geometry in ("toric", "planar"):
    code = build(2, geometry)
    d = {et: distance_bruteforce(code, et) for et in ("X", "Z")}
    print(f"{geometry} L=2 brute-force distance: {d}")
