// Published reference algorithms, transcribed from their row/column
// listings (rows: first half of the nodes, columns: second half, both
// read most-significant node first).

#ifndef SYNCOUNT_REFERENCE_H
#define SYNCOUNT_REFERENCE_H

#include "syncount/core_model.h"

namespace syncount::reference {

/// Cyclic, n=4, f=1, s=3, t=7.
Algorithm cyclic_4_3_7();

/// General, n=6, f=1, s=2, t=6.
Algorithm general_6_2_6();

/// Follow-the-leader for f=0: every node moves to 1 - (state of node 0).
Algorithm follow_the_leader(int n);

/// A_i(u) = u_i; never stabilizes.
Algorithm identity(const Params& params);

}  // namespace syncount::reference

#endif  // SYNCOUNT_REFERENCE_H
