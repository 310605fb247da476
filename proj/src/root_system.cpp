#include "dunklpot/root_system.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "dunklpot/errors.hpp"

namespace dunklpot {

namespace {

using RMat = std::vector<RVec>;

// Solves G c = b for square nonsingular G by Gauss-Jordan elimination.
RVec solve(RMat G, RVec b) {
    const std::size_t n = G.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && G[piv][col] == 0) ++piv;
        if (piv == n) throw InvalidArgument("simple roots are linearly dependent");
        std::swap(G[piv], G[col]);
        std::swap(b[piv], b[col]);
        Rational inv = 1 / G[col][col];
        for (std::size_t k = col; k < n; ++k) G[col][k] *= inv;
        b[col] *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || G[r][col] == 0) continue;
            Rational f = G[r][col];
            for (std::size_t k = col; k < n; ++k) G[r][k] -= f * G[col][k];
            b[r] -= f * b[col];
        }
    }
    return b;
}

RVec unit(int d, int i, const Rational& v = 1) {
    RVec e(d, Rational(0));
    e[i] = v;
    return e;
}

RVec reflect_exact(const RVec& alpha, const Rational& n2, const RVec& y) {
    Rational c = 2 * dot(alpha, y) / n2;
    RVec r = y;
    for (std::size_t k = 0; k < y.size(); ++k) r[k] -= c * alpha[k];
    return r;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

void check_cartan(const std::vector<RVec>& simple) {
    for (std::size_t i = 0; i < simple.size(); ++i)
        for (std::size_t j = 0; j < simple.size(); ++j) {
            if (i == j) continue;
            Rational aij = 2 * dot(simple[i], simple[j]) / norm2(simple[j]);
            Rational aji = 2 * dot(simple[i], simple[j]) / norm2(simple[i]);
            if (!is_integer(aij) || aij > 0)
                throw NonCrystallographic("Cartan entry " + aij.get_str() + " between simple roots " +
                                          std::to_string(i) + "," + std::to_string(j));
            Rational p = aij * aji;
            if (p > 3) throw NonCrystallographic("pair of simple roots generates an infinite group");
        }
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::A: return "A";
        case Family::B: return "B";
        case Family::C: return "C";
        case Family::D: return "D";
        case Family::G2: return "G2";
        case Family::Explicit: return "explicit";
        case Family::Trivial: return "trivial";
    }
    return "?";
}

Vec WeylElement::apply(const Vec& y) const {
    const std::size_t d = y.size();
    Vec r(d, 0.0);
    if (signed_permutation) {
        for (std::size_t k = 0; k < d; ++k) r[k] = perm_sign[k] * y[perm[k]];
        return r;
    }
    for (std::size_t k = 0; k < d; ++k) {
        double s = 0;
        for (std::size_t j = 0; j < d; ++j) s += matrix_f[k * d + j] * y[j];
        r[k] = s;
    }
    return r;
}

RVec WeylElement::apply(const RVec& y) const {
    const std::size_t d = y.size();
    RVec r(d, Rational(0));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j)
            if (matrix[k * d + j] != 0) r[k] += matrix[k * d + j] * y[j];
    return r;
}

bool LinearForm::is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& q) { return q == 0; });
}

bool RootSystem::complex_case() const {
    return std::all_of(mult_.begin(), mult_.end(), [](const Rational& k) { return k == 1; });
}

std::vector<Rational> RootSystem::simple_multiplicities() const {
    return std::vector<Rational>(mult_.begin(), mult_.begin() + rank_);
}

std::size_t RootSystem::find(const RVec& matrix) const {
    const std::size_t d = dim_;
    RVec key(d, Rational(0));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j) key[k] += matrix[k * d + j] * regular_[j];
    auto it = std::lower_bound(keys_->begin(), keys_->end(), key,
                               [](const auto& p, const RVec& k) { return p.first < k; });
    if (it == keys_->end() || it->first != key) return npos;
    return it->second;
}

std::size_t RootSystem::compose(std::size_t a, std::size_t b) const {
    std::size_t w = b;
    const auto& word = (*weyl_)[a].word;
    for (auto it = word.rbegin(); it != word.rend(); ++it) w = mul_[*it][w];
    return w;
}

std::size_t RootSystem::inverse(std::size_t a) const {
    std::size_t w = 0;
    for (int i : (*weyl_)[a].word) w = mul_[i][w];
    return w;
}

Vec RootSystem::reflect(std::size_t pos, const Vec& y) const {
    double c = 2 * pairing(pos, y) / norm2_[pos].get_d();
    return axpy(y, -c, positive_f_[pos]);
}

RVec RootSystem::reflect(std::size_t pos, const RVec& y) const {
    return reflect_exact(positive_[pos], norm2_[pos], y);
}

double RootSystem::pairing(std::size_t pos, const Vec& y) const { return dot(positive_f_[pos], y); }
Rational RootSystem::pairing(std::size_t pos, const RVec& y) const { return dot(positive_[pos], y); }

RootSystem RootSystem::assemble(Family fam, int dim, std::vector<RVec> simple, std::vector<Rational> kmult,
                                const BuildOptions& opt) {
    RootSystem rs;
    rs.family_ = fam;
    rs.dim_ = dim;
    rs.rank_ = static_cast<int>(simple.size());
    rs.span_only_ = opt.span_only;
    const int r = rs.rank_;
    if (kmult.empty()) kmult.assign(r, Rational(1));
    if (static_cast<int>(kmult.size()) != r) throw InvalidArgument("one multiplicity per simple root expected");
    for (const auto& k : kmult)
        if (k < 0) throw InvalidArgument("multiplicities must be non-negative");

    check_cartan(simple);

    RMat gram(r, RVec(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) gram[i][j] = dot(simple[i], simple[j]);

    auto coefficients = [&](const RVec& beta) {
        RVec rhs(r);
        for (int i = 0; i < r; ++i) rhs[i] = dot(simple[i], beta);
        return solve(gram, rhs);
    };

    // Closure of the simple roots under simple reflections; multiplicity travels along orbits.
    std::map<RVec, Rational> roots;
    std::deque<RVec> queue;
    for (int i = 0; i < r; ++i) {
        auto [it, fresh] = roots.emplace(simple[i], kmult[i]);
        if (!fresh && it->second != kmult[i]) throw InvalidArgument("multiplicity is not W-invariant");
        queue.push_back(simple[i]);
    }
    const std::size_t root_cap = 20000;
    while (!queue.empty()) {
        RVec beta = queue.front();
        queue.pop_front();
        Rational kb = roots.at(beta);
        for (int i = 0; i < r; ++i) {
            RVec img = reflect_exact(simple[i], gram[i][i], beta);
            auto [it, fresh] = roots.emplace(img, kb);
            if (fresh) {
                if (roots.size() > root_cap) throw EnumerationCapExceeded("root closure exceeded cap");
                queue.push_back(img);
            } else if (it->second != kb) {
                throw InvalidArgument("multiplicity is not W-invariant");
            }
        }
    }

    struct Entry {
        int height;
        std::vector<long> c;
        RVec v;
        Rational k;
    };
    std::vector<Entry> pos;
    for (const auto& [beta, k] : roots) {
        RVec c = coefficients(beta);
        bool nonneg = true, nonpos = true;
        std::vector<long> ci(r);
        for (int i = 0; i < r; ++i) {
            if (!is_integer(c[i])) throw NonCrystallographic("root is not an integer combination of simple roots");
            ci[i] = c[i].get_num().get_si();
            nonneg = nonneg && ci[i] >= 0;
            nonpos = nonpos && ci[i] <= 0;
        }
        if (!nonneg && !nonpos) throw NonCrystallographic("root with mixed-sign coefficients");
        if (nonneg) {
            int h = 0;
            for (long v : ci) h += static_cast<int>(v);
            pos.push_back({h, ci, beta, k});
        }
    }
    std::sort(pos.begin(), pos.end(), [](const Entry& a, const Entry& b) {
        if (a.height != b.height) return a.height < b.height;
        return std::lexicographical_compare(b.c.begin(), b.c.end(), a.c.begin(), a.c.end());
    });

    for (auto& e : pos) {
        rs.positive_.push_back(e.v);
        rs.coeffs_.push_back(e.c);
        rs.mult_.push_back(e.k);
        rs.norm2_.push_back(norm2(e.v));
        rs.positive_f_.push_back(to_double(e.v));
        rs.norm_f_.push_back(std::sqrt(rs.norm2_.back().get_d()));
        rs.height_ = std::max(rs.height_, e.height);
    }
    rs.simple_ = simple;

    for (std::size_t a = 0; a < rs.positive_.size(); ++a)
        for (std::size_t b = 0; b < rs.positive_.size(); ++b)
            if (!is_integer(2 * dot(rs.positive_[a], rs.positive_[b]) / rs.norm2_[b]))
                throw NonCrystallographic("non-integral pairing between positive roots");

    rs.kappa_ = 0;
    rs.rho_.assign(dim, Rational(0));
    rs.K0_ = 0;
    Rational c1sq = 0;
    for (std::size_t a = 0; a < rs.positive_.size(); ++a) {
        rs.kappa_ += rs.mult_[a];
        for (int k = 0; k < dim; ++k) rs.rho_[k] += rs.mult_[a] * rs.positive_[a][k] / 2;
        Rational inv = 1 / rs.norm2_[a];
        if (inv > rs.K0_) rs.K0_ = inv;
        if (rs.norm2_[a] > c1sq) c1sq = rs.norm2_[a];
    }
    rs.C1_ = std::sqrt(c1sq.get_d());

    rs.coweights_.assign(r, RVec(dim, Rational(0)));
    for (int j = 0; j < r; ++j) {
        RVec c = solve(gram, unit(r, j));
        for (int i = 0; i < r; ++i)
            for (int k = 0; k < dim; ++k) rs.coweights_[j][k] += c[i] * simple[i][k];
    }
    rs.regular_.assign(dim, Rational(0));
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < dim; ++k) rs.regular_[k] += rs.coweights_[j][k];

    // Breadth-first enumeration of W, deduplicated by the image of a regular vector.
    auto weyl = std::make_shared<std::vector<WeylElement>>();
    std::map<RVec, std::size_t> index;
    std::vector<RVec> keys;
    {
        WeylElement id;
        id.matrix.assign(dim * dim, Rational(0));
        for (int k = 0; k < dim; ++k) id.matrix[k * dim + k] = 1;
        weyl->push_back(id);
        keys.push_back(rs.regular_);
        index.emplace(rs.regular_, 0);
    }
    rs.mul_.assign(r, {});
    for (std::size_t head = 0; head < weyl->size(); ++head) {
        for (int i = 0; i < r; ++i) {
            RVec key = reflect_exact(simple[i], gram[i][i], keys[head]);
            auto it = index.find(key);
            std::size_t target;
            if (it != index.end()) {
                target = it->second;
            } else {
                if (weyl->size() >= opt.weyl_cap)
                    throw EnumerationCapExceeded("Weyl group larger than cap " + std::to_string(opt.weyl_cap));
                const WeylElement& src = (*weyl)[head];
                WeylElement e;
                e.matrix = src.matrix;
                for (int col = 0; col < dim; ++col) {
                    Rational p = 0;
                    for (int k = 0; k < dim; ++k) p += simple[i][k] * src.matrix[k * dim + col];
                    if (p == 0) continue;
                    Rational c = 2 * p / gram[i][i];
                    for (int k = 0; k < dim; ++k) e.matrix[k * dim + col] -= c * simple[i][k];
                }
                e.word.reserve(src.word.size() + 1);
                e.word.push_back(i);
                e.word.insert(e.word.end(), src.word.begin(), src.word.end());
                e.sign = -src.sign;
                target = weyl->size();
                index.emplace(key, target);
                keys.push_back(key);
                weyl->push_back(std::move(e));
            }
            if (rs.mul_[i].size() <= head) rs.mul_[i].resize(head + 1);
            rs.mul_[i][head] = target;
        }
    }
    for (int i = 0; i < r; ++i) rs.mul_[i].resize(weyl->size());
    for (std::size_t n = 0; n < weyl->size(); ++n) {
        WeylElement& e = (*weyl)[n];
        e.index = n;
        e.matrix_f.resize(e.matrix.size());
        for (std::size_t t = 0; t < e.matrix.size(); ++t) e.matrix_f[t] = e.matrix[t].get_d();
        bool sp = true;
        e.perm.assign(dim, 0);
        e.perm_sign.assign(dim, 0);
        for (int k = 0; k < dim && sp; ++k) {
            int nz = 0;
            for (int j = 0; j < dim; ++j) {
                const Rational& m = e.matrix[k * dim + j];
                if (m == 0) continue;
                if (m != 1 && m != -1) sp = false;
                e.perm[k] = j;
                e.perm_sign[k] = m > 0 ? 1 : -1;
                ++nz;
            }
            if (nz != 1) sp = false;
        }
        e.signed_permutation = sp;
        if (!sp) {
            e.perm.clear();
            e.perm_sign.clear();
        }
    }
    rs.keys_ = std::make_shared<std::vector<std::pair<RVec, std::size_t>>>(index.begin(), index.end());
    rs.weyl_ = weyl;

    for (std::size_t a = 0; a < rs.positive_.size(); ++a) {
        RVec key = reflect_exact(rs.positive_[a], rs.norm2_[a], rs.regular_);
        rs.refl_.push_back(index.at(key));
    }
    return rs;
}

RootSystem build_root_system(Family family, int rank, int ambient_dim, const BuildOptions& opt) {
    if (rank < 1) throw UnsupportedFamily("rank must be positive");
    std::vector<RVec> simple;
    std::string tag;
    auto root = [&](std::initializer_list<std::pair<int, int>> entries) {
        RVec v(ambient_dim, Rational(0));
        for (auto [i, c] : entries) v[i] = c;
        simple.push_back(v);
    };
    switch (family) {
        case Family::A:
            if (ambient_dim < rank + 1) throw UnsupportedFamily("A_n needs ambient dimension >= n+1");
            for (int i = 0; i < rank; ++i) root({{i, 1}, {i + 1, -1}});
            break;
        case Family::B:
        case Family::C:
            if (rank < 2) throw UnsupportedFamily("B_n and C_n need rank >= 2");
            if (ambient_dim < rank) throw UnsupportedFamily("ambient dimension below rank");
            for (int i = 0; i + 1 < rank; ++i) root({{i, 1}, {i + 1, -1}});
            root({{rank - 1, family == Family::B ? 1 : 2}});
            break;
        case Family::D:
            if (rank < 3) throw UnsupportedFamily("D_n needs rank >= 3");
            if (ambient_dim < rank) throw UnsupportedFamily("ambient dimension below rank");
            for (int i = 0; i + 1 < rank; ++i) root({{i, 1}, {i + 1, -1}});
            root({{rank - 2, 1}, {rank - 1, 1}});
            break;
        case Family::G2:
            if (rank != 2) throw UnsupportedFamily("G2 has rank 2");
            if (ambient_dim < 3) throw UnsupportedFamily("G2 is realized in R^3");
            root({{0, 1}, {1, -1}});
            root({{0, -2}, {1, 1}, {2, 1}});
            break;
        default: throw UnsupportedFamily("use root_system_from_simple_roots for explicit input");
    }
    if (opt.span_only && !(family == Family::A || family == Family::G2) && ambient_dim != rank)
        throw UnsupportedFamily("span-only realization needs roots spanning a hyperplane sum");
    RootSystem rs = RootSystem::assemble(family, ambient_dim, std::move(simple), {}, opt);
    std::string name = family == Family::G2 ? "g2" : std::string(1, static_cast<char>(std::tolower(family_name(family)[0]))) + std::to_string(rank);
    int natural = family == Family::A ? rank + 1 : (family == Family::G2 ? 3 : rank);
    if (opt.span_only)
        name += ":span";
    else if (ambient_dim != natural)
        name += ":" + std::to_string(ambient_dim);
    rs.id_ = name;
    return rs;
}

RootSystem root_system_from_simple_roots(std::vector<RVec> simple, std::vector<Rational> multiplicities,
                                         const BuildOptions& opt) {
    if (simple.empty()) throw InvalidArgument("at least one simple root required");
    const std::size_t d = simple[0].size();
    for (const auto& s : simple)
        if (s.size() != d) throw InvalidArgument("simple roots of unequal length");
    Rational smallest = norm2(simple[0]);
    for (const auto& s : simple) smallest = std::min(smallest, norm2(s));
    if (smallest == 0) throw InvalidArgument("zero simple root");
    long factor = 1;
    while (smallest * factor * factor < 1) ++factor;
    if (factor > 1)
        for (auto& s : simple)
            for (auto& c : s) c *= factor;
    RootSystem rs = RootSystem::assemble(Family::Explicit, static_cast<int>(d), std::move(simple),
                                         std::move(multiplicities), opt);
    rs.id_ = "explicit" + std::to_string(rs.rank()) + ":" + std::to_string(d);
    return rs;
}

RootSystem trivial_root_system(int dim) {
    if (dim < 1) throw InvalidArgument("dimension must be positive");
    RootSystem rs = RootSystem::assemble(Family::Trivial, dim, {}, {}, {});
    rs.id_ = "trivial:" + std::to_string(dim);
    return rs;
}

RootSystem parse_system(const std::string& selector, const BuildOptions& base) {
    std::string s;
    for (char c : selector) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::string head = s, tail;
    if (auto p = s.find(':'); p != std::string::npos) {
        head = s.substr(0, p);
        tail = s.substr(p + 1);
    }
    BuildOptions opt = base;
    auto parse_int = [&](const std::string& t) {
        if (t.empty() || !std::all_of(t.begin(), t.end(), ::isdigit))
            throw UnsupportedFamily("bad system selector '" + selector + "'");
        return std::stoi(t);
    };
    if (head == "trivial") return trivial_root_system(tail.empty() ? 2 : parse_int(tail));
    if (head.size() < 2) throw UnsupportedFamily("bad system selector '" + selector + "'");
    Family fam;
    int rank;
    if (head == "g2") {
        fam = Family::G2;
        rank = 2;
    } else {
        switch (head[0]) {
            case 'a': fam = Family::A; break;
            case 'b': fam = Family::B; break;
            case 'c': fam = Family::C; break;
            case 'd': fam = Family::D; break;
            default: throw UnsupportedFamily("unknown family in '" + selector + "'");
        }
        rank = parse_int(head.substr(1));
    }
    int natural = fam == Family::A ? rank + 1 : (fam == Family::G2 ? 3 : rank);
    int dim = natural;
    if (tail == "span")
        opt.span_only = true;
    else if (!tail.empty())
        dim = parse_int(tail);
    return build_root_system(fam, rank, dim, opt);
}

std::vector<std::string> catalog_selectors() {
    return {"a1", "a2", "a3", "a4", "b2", "b3", "b4", "c2", "c3", "c4", "d3", "d4", "g2"};
}

const std::vector<WeylElement>& enumerate_weyl(const RootSystem& rs) { return rs.weyl(); }

ChamberProjection project_to_chamber(const RootSystem& rs, const Vec& x) {
    ChamberProjection out{x, 0};
    const int r = rs.rank();
    const std::size_t guard = 4 * rs.num_positive_roots() + 8;
    for (std::size_t step = 0; step < guard; ++step) {
        int neg = -1;
        for (int i = 0; i < r; ++i)
            if (rs.pairing(i, out.x_plus) < 0) {
                neg = i;
                break;
            }
        if (neg < 0) break;
        out.x_plus = rs.reflect(neg, out.x_plus);
        out.w = rs.left_simple(neg, out.w);
    }
    return out;
}

ChamberProjectionExact project_to_chamber(const RootSystem& rs, const RVec& x) {
    ChamberProjectionExact out{x, 0};
    const int r = rs.rank();
    for (;;) {
        int neg = -1;
        for (int i = 0; i < r; ++i)
            if (rs.pairing(i, out.x_plus) < 0) {
                neg = i;
                break;
            }
        if (neg < 0) break;
        out.x_plus = rs.reflect(neg, out.x_plus);
        out.w = rs.left_simple(neg, out.w);
    }
    return out;
}

bool in_closed_chamber(const RootSystem& rs, const Vec& x) {
    for (int i = 0; i < rs.rank(); ++i)
        if (rs.pairing(i, x) < 0) return false;
    return true;
}

std::vector<LinearForm> decompose_orbit_difference(const RootSystem& rs, std::size_t w) {
    const int r = rs.rank();
    const int d = rs.ambient_dim();
    const auto& S = rs.simple_roots();
    const WeylElement& el = rs.weyl().at(w);
    RMat gram(r, RVec(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) gram[i][j] = dot(S[i], S[j]);

    // v_j = (I - w^T) alpha_j, so <alpha_j, y - w y> = <v_j, y>.
    std::vector<RVec> v(r, RVec(d, Rational(0)));
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < d; ++k) {
            Rational t = S[j][k];
            for (int l = 0; l < d; ++l) t -= el.matrix[l * d + k] * S[j][l];
            v[j][k] = t;
        }
    std::vector<LinearForm> out(r);
    for (int i = 0; i < r; ++i) {
        // u_i = |alpha_i|^2/2 * sum_j (G^-1)_{ij} v_j
        RVec ginv_row = solve(gram, unit(r, i));
        RVec u(d, Rational(0));
        for (int j = 0; j < r; ++j)
            if (ginv_row[j] != 0)
                for (int k = 0; k < d; ++k) u[k] += ginv_row[j] * v[j][k];
        for (auto& c : u) c *= gram[i][i] / 2;
        RVec rhs(r);
        for (int k = 0; k < r; ++k) rhs[k] = dot(S[k], u);
        RVec n = solve(gram, rhs);
        for (int k = 0; k < r; ++k) {
            if (!is_integer(n[k]) || n[k] < 0)
                throw DecompositionFailed("coefficient " + n[k].get_str() + " for element " + std::to_string(w));
        }
        if (std::any_of(n.begin(), n.end(), [](const Rational& q) { return q != 0; }) && n[i] <= 0)
            throw DecompositionFailed("a_i^w nonzero without alpha_i");
        out[i].coeffs = std::move(n);
    }
    return out;
}

Rational evaluate(const RootSystem& rs, const LinearForm& a, const RVec& y) {
    Rational s = 0;
    for (int j = 0; j < rs.rank(); ++j)
        if (a.coeffs[j] != 0) s += a.coeffs[j] * dot(rs.simple_roots()[j], y);
    return s;
}

long max_orbit_coeff(const RootSystem& rs) {
    long m = 0;
    for (std::size_t w = 0; w < rs.weyl_order(); ++w)
        for (const auto& a : decompose_orbit_difference(rs, w))
            for (const auto& c : a.coeffs) m = std::max(m, c.get_num().get_si());
    return m;
}

Polynomial pi_polynomial(const RootSystem& rs) {
    Polynomial p = Polynomial::constant(rs.ambient_dim(), 1);
    for (const auto& a : rs.positive_roots()) p = p * Polynomial::linear(a);
    return p;
}

double pi_value(const RootSystem& rs, const Vec& x) {
    double p = 1;
    for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) p *= rs.pairing(a, x);
    return p;
}

Rational pi_value(const RootSystem& rs, const RVec& x) {
    Rational p = 1;
    for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) p *= rs.pairing(a, x);
    return p;
}

BasicSubsystem basic_subsystem(const RootSystem& rs, std::vector<int> simple) {
    std::sort(simple.begin(), simple.end());
    simple.erase(std::unique(simple.begin(), simple.end()), simple.end());
    BasicSubsystem sub;
    sub.simple = simple;
    std::vector<bool> in(rs.rank(), false);
    for (int i : simple) {
        if (i < 0 || i >= rs.rank()) throw InvalidArgument("simple root index out of range");
        in[i] = true;
    }
    for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
        const auto& c = rs.positive_coefficients()[a];
        bool inside = true;
        for (int i = 0; i < rs.rank(); ++i)
            if (c[i] != 0 && !in[i]) inside = false;
        (inside ? sub.positive : sub.complement).push_back(a);
    }
    std::vector<bool> seen(rs.weyl_order(), false);
    std::deque<std::size_t> q{0};
    seen[0] = true;
    while (!q.empty()) {
        std::size_t w = q.front();
        q.pop_front();
        sub.subgroup.push_back(w);
        for (int i : simple) {
            std::size_t t = rs.left_simple(i, w);
            if (!seen[t]) {
                seen[t] = true;
                q.push_back(t);
            }
        }
    }
    std::sort(sub.subgroup.begin(), sub.subgroup.end());
    for (std::size_t w = 0; w < rs.weyl_order(); ++w)
        if (!seen[w]) sub.cosubgroup.push_back(w);
    return sub;
}

std::vector<BasicSubsystem> all_basic_subsystems(const RootSystem& rs) {
    std::vector<BasicSubsystem> out;
    const int r = rs.rank();
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < r; ++i)
            if (mask & (1u << i)) s.push_back(i);
        out.push_back(basic_subsystem(rs, s));
    }
    return out;
}

Rational pi_derivative_constant(const RootSystem& rs, const BasicSubsystem& sub) {
    if (sub.positive.empty()) throw InvalidArgument("basic subsystem must be nonempty");
    Polynomial p = Polynomial::constant(rs.ambient_dim(), 1);
    for (std::size_t a : sub.positive) p = p * Polynomial::linear(rs.positive_roots()[a]);
    for (std::size_t a : sub.positive) p = p.derivative(rs.positive_roots()[a]);
    if (!p.is_constant() || p.is_zero()) throw InvalidArgument("derivative did not reduce to a nonzero constant");
    return p.constant_term();
}

double dist_to_wall(const RootSystem& rs, std::size_t pos, const Vec& y) {
    RVec ye = exact(y);
    for (int i = 0; i < rs.rank(); ++i)
        if (rs.pairing(i, ye) < 0) throw NotInChamber("point has a negative simple-root pairing");
    return rs.pairing(pos, y) / rs.norms()[pos];
}

}  // namespace dunklpot
