#pragma once

// The universal discrete step-two nilpotent group G0(d).
//
// Coordinates are indexed by pairs (l1,l2) with 0 <= l2 < l1 <= d.  A pair
// (l1,0) is a non-central index, a pair with l2 >= 1 is central.  The group
// law twists only the central part:
//
//   [x*y]_{l1,0}  = x_{l1,0} + y_{l1,0}
//   [x*y]_{l1,l2} = x_{l1,l2} + y_{l1,l2} + x_{l1,0} * y_{l2,0}   (l2 >= 1)
//
// Elements are plain coordinate vectors in a fixed ordering (non-central
// indices first, then central ones, both lexicographic).  Lattice elements
// use overflow-checked 128-bit integers, the continuous variant uses double.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilcircle/checked_int.hpp"

namespace nilcircle {

struct IndexPair {
    int l1 = 0;
    int l2 = 0;
    friend bool operator==(IndexPair a, IndexPair b) = default;
};

class GroupShape {
public:
    GroupShape() : d_(0) {}
    explicit GroupShape(int d) : d_(d) {
        if (d < 1) throw std::invalid_argument("GroupShape: degree must be >= 1");
    }

    int degree() const { return d_; }
    int n_noncentral() const { return d_; }
    int n_central() const { return d_ * (d_ - 1) / 2; }
    int size() const { return d_ + n_central(); }

    // Ordered index set: (1,0),...,(d,0),(2,1),(3,1),(3,2),(4,1),...
    std::vector<IndexPair> index_set() const {
        std::vector<IndexPair> v;
        v.reserve(size());
        for (int l1 = 1; l1 <= d_; ++l1) v.push_back({l1, 0});
        for (int l1 = 2; l1 <= d_; ++l1)
            for (int l2 = 1; l2 < l1; ++l2) v.push_back({l1, l2});
        return v;
    }

    int position(int l1, int l2) const {
        if (l1 < 1 || l1 > d_ || l2 < 0 || l2 >= l1)
            throw std::out_of_range("GroupShape: bad index pair");
        if (l2 == 0) return l1 - 1;
        return d_ + (l1 - 1) * (l1 - 2) / 2 + (l2 - 1);
    }

    // Dilation exponent l1+l2 of the coordinate at a given position.
    int weight_at(int pos) const {
        IndexPair p = pair_at(pos);
        return p.l1 + p.l2;
    }

    IndexPair pair_at(int pos) const {
        if (pos < 0 || pos >= size()) throw std::out_of_range("GroupShape: bad position");
        if (pos < d_) return {pos + 1, 0};
        int r = pos - d_;
        int l1 = 2;
        while (r >= l1 - 1) { r -= l1 - 1; ++l1; }
        return {l1, r + 1};
    }

    // Sum of all dilation exponents (the homogeneous dimension).
    int homogeneous_dimension() const {
        int s = 0;
        for (int p = 0; p < size(); ++p) s += weight_at(p);
        return s;
    }

    friend bool operator==(const GroupShape& a, const GroupShape& b) { return a.d_ == b.d_; }
    friend bool operator!=(const GroupShape& a, const GroupShape& b) { return a.d_ != b.d_; }

private:
    int d_;
};

template <typename T>
struct GroupElement {
    GroupShape shape;
    std::vector<T> coords;

    GroupElement() = default;
    explicit GroupElement(GroupShape s) : shape(s), coords(s.size(), T(0)) {}
    GroupElement(GroupShape s, std::vector<T> c) : shape(s), coords(std::move(c)) {
        if (static_cast<int>(coords.size()) != shape.size())
            throw std::invalid_argument("GroupElement: coordinate count mismatch");
    }

    T& at(int l1, int l2) { return coords[shape.position(l1, l2)]; }
    const T& at(int l1, int l2) const { return coords[shape.position(l1, l2)]; }

    // Split views g = (g1, g2): non-central block of length d, central block of length d'.
    std::vector<T> noncentral() const {
        return std::vector<T>(coords.begin(), coords.begin() + shape.n_noncentral());
    }
    std::vector<T> central() const {
        return std::vector<T>(coords.begin() + shape.n_noncentral(), coords.end());
    }

    bool is_zero() const {
        for (const T& c : coords)
            if (!(c == T(0))) return false;
        return true;
    }

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.shape == b.shape && a.coords == b.coords;
    }
};

using LatticeElement = GroupElement<Int>;
using RealElement = GroupElement<double>;

// Default absolute tolerance for comparing continuous-variant elements.
inline constexpr double kRealElementTol = 1e-12;

inline bool approx_equal(const RealElement& a, const RealElement& b,
                         double tol = kRealElementTol) {
    if (a.shape != b.shape) return false;
    for (size_t i = 0; i < a.coords.size(); ++i)
        if (std::abs(a.coords[i] - b.coords[i]) > tol) return false;
    return true;
}

namespace detail {
inline Int scalar_pow(Int b, int e) { return ipow(b, e); }
inline double scalar_pow(double b, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}
} // namespace detail

// Bilinear form R0: [R0(x,y)]_{l1,l2} = x_{l1,0} * y_{l2,0}, central block output.
template <typename T>
std::vector<T> bilinear_r0(const std::vector<T>& x1, const std::vector<T>& y1,
                           const GroupShape& shape) {
    const int d = shape.degree();
    if (static_cast<int>(x1.size()) != d || static_cast<int>(y1.size()) != d)
        throw std::invalid_argument("bilinear_r0: vectors must have length d");
    std::vector<T> out;
    out.reserve(shape.n_central());
    for (int l1 = 2; l1 <= d; ++l1)
        for (int l2 = 1; l2 < l1; ++l2)
            out.push_back(x1[l1 - 1] * y1[l2 - 1]);
    return out;
}

template <typename T>
GroupElement<T> multiply(const GroupElement<T>& x, const GroupElement<T>& y) {
    if (x.shape != y.shape) throw std::invalid_argument("multiply: shape mismatch");
    const GroupShape& s = x.shape;
    const int d = s.degree();
    GroupElement<T> out(s);
    for (int i = 0; i < d; ++i) out.coords[i] = x.coords[i] + y.coords[i];
    int p = d;
    for (int l1 = 2; l1 <= d; ++l1)
        for (int l2 = 1; l2 < l1; ++l2, ++p)
            out.coords[p] = x.coords[p] + y.coords[p] + x.coords[l1 - 1] * y.coords[l2 - 1];
    return out;
}

// g^{-1} = (-g1, -g2 + R0(g1, g1)).
template <typename T>
GroupElement<T> inverse(const GroupElement<T>& g) {
    const GroupShape& s = g.shape;
    const int d = s.degree();
    GroupElement<T> out(s);
    for (int i = 0; i < d; ++i) out.coords[i] = -g.coords[i];
    int p = d;
    for (int l1 = 2; l1 <= d; ++l1)
        for (int l2 = 1; l2 < l1; ++l2, ++p)
            out.coords[p] = -g.coords[p] + g.coords[l1 - 1] * g.coords[l2 - 1];
    return out;
}

// Anisotropic dilation: coordinate (l1,l2) scales by Lambda^(l1+l2).
// Lattice elements stay in the lattice only for integer Lambda, so the
// scalar type of Lambda matches the element type.
template <typename T>
GroupElement<T> dilate(const T& lambda, const GroupElement<T>& g) {
    if (!(T(0) < lambda)) throw std::domain_error("dilate: Lambda must be positive");
    GroupElement<T> out(g.shape);
    for (int p = 0; p < g.shape.size(); ++p)
        out.coords[p] = detail::scalar_pow(lambda, g.shape.weight_at(p)) * g.coords[p];
    return out;
}

// Moment curve A0(n): non-central coordinates (n, n^2, ..., n^d), central zero.
template <typename T>
GroupElement<T> moment_curve(const T& n, const GroupShape& shape) {
    GroupElement<T> out(shape);
    for (int l1 = 1; l1 <= shape.degree(); ++l1)
        out.coords[l1 - 1] = detail::scalar_pow(n, l1);
    return out;
}

// Non-central part of the moment curve as a plain vector.
template <typename T>
std::vector<T> moment_curve_noncentral(const T& n, int d) {
    std::vector<T> v(d);
    for (int l1 = 1; l1 <= d; ++l1) v[l1 - 1] = detail::scalar_pow(n, l1);
    return v;
}

enum class WordVariant { D, DTilde };

// Closed forms of the alternating word maps.  With x = (x_1..x_r), y = (y_1..y_r):
//
//   [D(x,y)]_{l1,0}  = sum_j (y_j^{l1} - x_j^{l1})
//   [D(x,y)]_{l1,l2} = sum_{j1<j2} (y_{j1}^{l1}-x_{j1}^{l1})(y_{j2}^{l2}-x_{j2}^{l2})
//                      + sum_j (x_j^{l1+l2} - x_j^{l1} y_j^{l2})
//
// and DTilde with the roles of x and y swapped in the differences and the
// diagonal term replaced by y_j^{l1+l2} - x_j^{l1} y_j^{l2}.
template <typename T>
GroupElement<T> d_form(const std::vector<T>& x, const std::vector<T>& y,
                       WordVariant variant, const GroupShape& shape) {
    if (x.size() != y.size()) throw std::invalid_argument("d_form: length mismatch");
    const int r = static_cast<int>(x.size());
    const int d = shape.degree();
    GroupElement<T> out(shape);

    // diff(j, l) = y_j^l - x_j^l for D, x_j^l - y_j^l for DTilde.
    auto diff = [&](int j, int l) -> T {
        T yp = detail::scalar_pow(y[j], l);
        T xp = detail::scalar_pow(x[j], l);
        return variant == WordVariant::D ? yp - xp : xp - yp;
    };

    for (int l1 = 1; l1 <= d; ++l1) {
        T s(0);
        for (int j = 0; j < r; ++j) s = s + diff(j, l1);
        out.coords[l1 - 1] = s;
    }
    int p = d;
    for (int l1 = 2; l1 <= d; ++l1) {
        for (int l2 = 1; l2 < l1; ++l2, ++p) {
            T s(0);
            // Cross terms via prefix sums of diff(., l1).
            T prefix(0);
            for (int j = 0; j < r; ++j) {
                s = s + prefix * diff(j, l2);
                prefix = prefix + diff(j, l1);
            }
            for (int j = 0; j < r; ++j) {
                if (variant == WordVariant::D)
                    s = s + detail::scalar_pow(x[j], l1 + l2) -
                        detail::scalar_pow(x[j], l1) * detail::scalar_pow(y[j], l2);
                else
                    s = s + detail::scalar_pow(y[j], l1 + l2) -
                        detail::scalar_pow(x[j], l1) * detail::scalar_pow(y[j], l2);
            }
            out.coords[p] = s;
        }
    }
    return out;
}

// The same maps as explicit alternating products of moment-curve points:
//   D:      A0(x_1)^{-1} A0(y_1) ... A0(x_r)^{-1} A0(y_r)
//   DTilde: A0(x_1) A0(y_1)^{-1} ... A0(x_r) A0(y_r)^{-1}
template <typename T>
GroupElement<T> alternating_word(const std::vector<T>& x, const std::vector<T>& y,
                                 WordVariant variant, const GroupShape& shape) {
    if (x.size() != y.size()) throw std::invalid_argument("alternating_word: length mismatch");
    GroupElement<T> acc(shape);
    for (size_t j = 0; j < x.size(); ++j) {
        GroupElement<T> ax = moment_curve(x[j], shape);
        GroupElement<T> ay = moment_curve(y[j], shape);
        if (variant == WordVariant::D) {
            acc = multiply(acc, inverse(ax));
            acc = multiply(acc, ay);
        } else {
            acc = multiply(acc, ax);
            acc = multiply(acc, inverse(ay));
        }
    }
    return acc;
}

// Coset structure modulo Q: H_Q = elements with all coordinates in Q*Z,
// J_Q = elements with coordinates in [0, Q-1].  Every g factors uniquely
// as g = box * lattice with box in J_Q and lattice in H_Q.
struct CosetPair {
    LatticeElement box;      // J_Q component
    LatticeElement lattice;  // H_Q component
    long long modulus = 1;
};

inline CosetPair coset_decompose(const LatticeElement& g, long long Q) {
    if (Q < 1) throw std::domain_error("coset_decompose: Q must be >= 1");
    const GroupShape& s = g.shape;
    const int d = s.degree();
    CosetPair out{LatticeElement(s), LatticeElement(s), Q};
    const Int q(Q);
    // Non-central coordinates split directly.
    for (int i = 0; i < d; ++i) {
        Int b = floor_mod(g.coords[i], q);
        out.box.coords[i] = b;
        out.lattice.coords[i] = g.coords[i] - b;
    }
    // Central coordinates: the product twists by R0(box^{(1)}, lattice^{(1)}),
    // which is divisible by Q, so box is still the plain residue.
    int p = d;
    for (int l1 = 2; l1 <= d; ++l1) {
        for (int l2 = 1; l2 < l1; ++l2, ++p) {
            Int b = floor_mod(g.coords[p], q);
            out.box.coords[p] = b;
            out.lattice.coords[p] =
                g.coords[p] - b - out.box.coords[l1 - 1] * out.lattice.coords[l2 - 1];
        }
    }
    return out;
}

// Text form "d=2:[1,1,0]".
inline std::string to_text(const LatticeElement& g) {
    std::string s = "d=" + std::to_string(g.shape.degree()) + ":[";
    for (size_t i = 0; i < g.coords.size(); ++i) {
        if (i) s += ",";
        s += g.coords[i].str();
    }
    s += "]";
    return s;
}

inline LatticeElement element_from_text(const std::string& text) {
    size_t eq = text.find("d=");
    size_t colon = text.find(':');
    size_t lb = text.find('[');
    size_t rb = text.rfind(']');
    if (eq != 0 || colon == std::string::npos || lb == std::string::npos ||
        rb == std::string::npos || rb < lb)
        throw std::invalid_argument("element_from_text: malformed input");
    int d = std::stoi(text.substr(2, colon - 2));
    GroupShape shape(d);
    std::vector<Int> coords;
    std::string body = text.substr(lb + 1, rb - lb - 1);
    size_t pos = 0;
    while (pos <= body.size() && !body.empty()) {
        size_t comma = body.find(',', pos);
        std::string tok = body.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        coords.push_back(Int(std::stoll(tok)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return LatticeElement(shape, std::move(coords));
}

struct LatticeElementHash {
    size_t operator()(const LatticeElement& g) const {
        size_t h = static_cast<size_t>(g.shape.degree()) * 0x9E3779B97F4A7C15ull;
        IntHash ih;
        for (const Int& c : g.coords) h ^= ih(c) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return h;
    }
};

// Lexicographic coordinate order; used wherever deterministic iteration matters.
struct LatticeElementLess {
    bool operator()(const LatticeElement& a, const LatticeElement& b) const {
        for (size_t i = 0; i < a.coords.size() && i < b.coords.size(); ++i) {
            if (a.coords[i] < b.coords[i]) return true;
            if (b.coords[i] < a.coords[i]) return false;
        }
        return a.coords.size() < b.coords.size();
    }
};

} // namespace nilcircle
