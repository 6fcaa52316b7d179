#pragma once

#include <cstddef>
#include <vector>

#include "kpz/errors.hpp"

namespace kpz {

// A terminal probe configuration: heights hs[i] pinned at positions
// xs[i] at time t.  Positions are strictly increasing; t lies in (0,1].
struct ProbeConfig {
    double t = 1.0;
    std::vector<double> xs;
    std::vector<double> hs;

    std::size_t size() const { return xs.size(); }

    // Throws DomainError on malformed input.  Probe counts are capped
    // at 64; the envelope construction is O(n^2) and the cap keeps all
    // downstream solvers comfortably dense-linear-algebra sized.
    void validate() const;
};

// Position of a configuration relative to the admissible height space
// H = {h : h_c >= p(t,x_c)} and its concave subset H_conc:
//
//   OutsideH         some height lies strictly below the parabola
//   OnBoundaryH      some height sits exactly on the parabola (none below)
//   InHNotConc       inside H but at least one probe hangs below the
//                    concave envelope of the others
//   InHconcInterior  concave, every probe carries a strict kink
//   InHconc          concave with a degeneracy (zero kink angle:
//                    collinear neighbours or a flank tangency)
//
// The first matching tag in the order above wins.
enum class MembershipClass {
    OutsideH,
    OnBoundaryH,
    InHNotConc,
    InHconcInterior,
    InHconc,
};

MembershipClass classify(const ProbeConfig& config);

// True when the configuration lies in the closed set H_conc: no height
// below the parabola and every probe on the concave envelope.  This is
// the precondition for shock-tree construction; it is weaker than
// classify() == InHconc* because boundary contacts (OnBoundaryH) with a
// fully supported envelope still belong to H_conc.
bool in_H_conc(const ProbeConfig& config);

const char* to_string(MembershipClass c);

} // namespace kpz
