"""
Mermin relations and their contradictions
=========================================

List the Pauli-product relations satisfied by GHZ_z, then search for subsets
whose outcome variables cancel while their signs multiply to -1.
"""

from bernstein import find_contradictions, mermin_observables, verify_relation_table

for n in (3, 4, 5):
    rels = mermin_observables(n)
    check = verify_relation_table(n)
    print(f"N={n}: {len(rels)} relations, measured signs match: {check.all_match}")
    for r in rels[:6]:
        print("   ", r)
    if len(rels) > 6:
        print("    ...")
    sets = find_contradictions(n, 4)
    print(f"    {len(sets)} contradictions among subsets of at most four relations")
    first = sets[0]
    print("    e.g.", " * ".join(rels[i].axes for i in first.relation_indices))
