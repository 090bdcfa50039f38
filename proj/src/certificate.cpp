#include "kdvw/certificate.hpp"

namespace kdvw {

Certificate exact_match(std::string claim, const DiffPoly& derived, const DiffPoly& printed,
                        std::vector<std::string> deps) {
    return zero_certificate(std::move(claim), derived - printed, std::move(deps));
}

Certificate multiple_match(std::string claim, const DiffPoly& derived, const DiffPoly& printed, Key top,
                           std::vector<std::string> deps) {
    const DiffPoly a = derived.coeff(top, 1), b = printed.coeff(top, 1);
    Certificate c;
    if (!a.is_constant() || a.is_zero() || !b.is_constant()) {
        c = zero_certificate(std::move(claim), printed, std::move(deps));
        c.pass = false;
        c.detail = "no constant top coefficient";
        return c;
    }
    const Scalar m = b.constant_term() / a.constant_term();
    c = zero_certificate(std::move(claim), printed - derived * m, std::move(deps));
    c.multiplier = m.str();
    if (m.is_zero()) c.pass = false;
    return c;
}

}  // namespace kdvw
