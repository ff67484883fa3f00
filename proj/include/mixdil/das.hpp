#pragma once

#include <cstdint>

#include "mixdil/bank.hpp"
#include "mixdil/verify.hpp"
#include "mixdil/xform.hpp"

namespace mixdil {

/// Composed filter b_{l,j} = (b_l up M_0^{j-1}) * b_{0,j-1}, with b_{0,0} = delta_0 I_r.
/// Throws std::out_of_range for a bad channel or level.
FilterSeq das_filter(const FilterBank& bank, int l, int j, Side side = Side::primal);

struct DasElement {
  int channel;
  int level;
  IntVector shift;
  FilterSeq seq;
};

/// |det M_0|^{(j-1)/2} |det M_l|^{1/2} b_{l,j}(. - M_0^{j-1} M_l k).
DasElement das_element(const FilterBank& bank, int l, int j, const IntVector& k, Side side = Side::primal);

/// The shift lattice generator M_0^{j-1} M_l (the identity for l = 0, j = 0).
IntMatrix das_shift_matrix(const FilterBank& bank, int l, int j);

/// Box [lo, hi] of integer k with S k possibly inside the box [x_lo, x_hi].
std::pair<IntVector, IntVector> shift_range(const IntMatrix& s, const IntVector& x_lo, const IntVector& x_hi);

/// sum_k band(k) b_{l,j;k}, element by element. band has any row count and as many
/// columns as the elements have rows.
FilterSeq das_combination(const FilterBank& bank, int l, int j, const FilterSeq& band, Side side = Side::primal);

/// <v, b_{l,j;k}> over every k where the pairing can be nonzero.
FilterSeq das_coefficients(const FilterBank& bank, int l, int j, const FilterSeq& v);

/// Cascade identity between level j-1 lowpass pairings and level j pairings of all
/// channels, on random finitely supported v, w.
VerificationReport check_cascade(const FilterBank& bank, int j, int trials, std::uint64_t seed = 1,
                                 double tol = kDefaultTolerance);

/// Reconstructs random v from its DAS coefficients against the dual elements.
VerificationReport check_frame_expansion(const FilterBank& bank, int levels, int trials, std::uint64_t seed = 1,
                                         double tol = kDefaultTolerance);

/// Kronecker pattern of pairings between dual and primal elements. Every primal
/// element with shifts in [-window, window]^d is paired with every dual element
/// whose support can overlap it.
VerificationReport check_das_biorthogonality(const FilterBank& bank, int levels, int window,
                                             double tol = kDefaultTolerance);

}  // namespace mixdil
