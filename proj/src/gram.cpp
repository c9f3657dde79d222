#include "hermdens/gram.hpp"

#include <algorithm>

namespace hermdens {

HermitianGram HermitianGram::from_matrix(const BMatrix& G) {
    if (G.rows != G.cols)
        throw config_error("HermitianGram: matrix not square");
    return HermitianGram{G.rows, G};
}

GramDiagnostics validate_gram(const HermitianGram& G) {
    GramDiagnostics d;
    auto complain = [&](const std::string& s) {
        d.ok = false;
        d.issues.push_back(s);
    };
    for (int i = 0; i < G.n; ++i) {
        if (G.m.at(i, i).b != 0)
            complain("diagonal entry (" + std::to_string(i) + "," + std::to_string(i) +
                     ") has a pi part, not fixed by conjugation");
        for (int j = i + 1; j < G.n; ++j) {
            if (G.m.at(j, i) != conj(G.m.at(i, j)))
                complain("entries (" + std::to_string(i) + "," + std::to_string(j) +
                         ") and (" + std::to_string(j) + "," + std::to_string(i) +
                         ") are not conjugate");
        }
    }
    if (d.ok && G.n > 0) {
        int vd = pi_valuation(det(G.m));
        if (vd >= 2 * G.K() - kValGuard)
            complain("determinant valuation " + std::to_string(vd) +
                     " exhausts the precision window; raise the working precision");
    }
    return d;
}

ScaleNorm scale_norm_ideals(const HermitianGram& G) {
    int s = kValInfinite, nrm = kValInfinite;
    for (int i = 0; i < G.n; ++i) {
        nrm = std::min(nrm, pi_valuation(G.m.at(i, i)));
        for (int j = 0; j < G.n; ++j) {
            s = std::min(s, pi_valuation(G.m.at(i, j)));
            if (i < j) {
                // h(x+y, x+y) picks up Tr(g*c) for every c in B; the ideal those
                // traces generate is spanned by Tr(g) and Tr(g*pi).
                RamifiedElem tr = add(G.m.at(i, j), conj(G.m.at(i, j)));
                nrm = std::min(nrm, pi_valuation(tr));
                RamifiedElem gp = mul(G.m.at(i, j), RamifiedElem::pi(G.K(), G.delta()));
                RamifiedElem trp = add(gp, conj(gp));
                nrm = std::min(nrm, pi_valuation(trp));
            }
        }
    }
    return ScaleNorm{s, nrm};
}

} // namespace hermdens
