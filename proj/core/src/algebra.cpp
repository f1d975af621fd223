#include "vlnc/algebra.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace vlnc {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::CompositeCharacteristic: return "CompositeCharacteristic";
        case ErrorKind::InvalidDegree: return "InvalidDegree";
        case ErrorKind::FieldMismatch: return "FieldMismatch";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::ShapeError: return "ShapeError";
        case ErrorKind::UnsupportedDomain: return "UnsupportedDomain";
        case ErrorKind::NotDisjoint: return "NotDisjoint";
        case ErrorKind::NoSuchNode: return "NoSuchNode";
        case ErrorKind::NoSuchEdge: return "NoSuchEdge";
        case ErrorKind::InconsistentCode: return "InconsistentCode";
        case ErrorKind::IncompleteCode: return "IncompleteCode";
        case ErrorKind::InvalidArg: return "InvalidArg";
        case ErrorKind::IncompleteRank: return "IncompleteRank";
        case ErrorKind::NotPolymatroid: return "NotPolymatroid";
        case ErrorKind::NotASolution: return "NotASolution";
        case ErrorKind::IncompleteMap: return "IncompleteMap";
        case ErrorKind::SpaceTooLarge: return "SpaceTooLarge";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Error";
}

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

namespace {

// Polynomials over Z_p as coefficient vectors, low degree first, trimmed.

std::vector<int> poly_trim(std::vector<int> a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& m, int p) {
    a = poly_trim(std::move(a));
    const int dm = (int)m.size() - 1;
    while ((int)a.size() - 1 >= dm && !a.empty()) {
        const int shift = (int)a.size() - 1 - dm;
        // m is monic, so the factor is just the leading coefficient of a.
        const int f = a.back();
        for (int i = 0; i <= dm; ++i) {
            int& c = a[shift + i];
            c = ((c - f * m[i]) % p + p) % p;
        }
        a = poly_trim(std::move(a));
    }
    return a;
}

std::vector<int> poly_mul_mod(const std::vector<int>& a, const std::vector<int>& b,
                              const std::vector<int>& m, int p) {
    if (a.empty() || b.empty()) return {};
    std::vector<int> c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    return poly_mod(std::move(c), m, p);
}

bool poly_divides(const std::vector<int>& g, const std::vector<int>& f, int p) {
    return poly_mod(f, g, p).empty();
}

// Irreducibility by trial division with every monic polynomial of degree
// 1..deg/2. Cheap at the scales this library supports.
bool poly_irreducible(const std::vector<int>& f, int p) {
    const int n = (int)f.size() - 1;
    for (int d = 1; 2 * d <= n; ++d) {
        std::vector<int> g(d + 1, 0);
        g[d] = 1;
        int64_t count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (int64_t idx = 0; idx < count; ++idx) {
            int64_t t = idx;
            for (int i = 0; i < d; ++i) {
                g[i] = (int)(t % p);
                t /= p;
            }
            if (poly_divides(g, f, p)) return false;
        }
    }
    return true;
}

std::vector<int> smallest_irreducible(int p, int n) {
    if (n == 1) return {0, 1}; // x
    std::vector<int> f(n + 1, 0);
    f[n] = 1;
    int64_t count = 1;
    for (int i = 0; i < n; ++i) count *= p;
    // Lexicographic over (c0, c1, ..., c_{n-1}), c0 most significant.
    std::vector<int> c(n, 0);
    for (;;) {
        for (int i = 0; i < n; ++i) f[i] = c[i];
        if (poly_irreducible(f, p)) return f;
        int i = n - 1;
        while (i >= 0 && c[i] == p - 1) c[i--] = 0;
        if (i < 0) break;
        ++c[i];
    }
    raise(ErrorKind::InvalidArg, "no irreducible polynomial found");
}

constexpr int kMaxDomainSize = 1024; // desk scale

std::string join_ints(const std::vector<int>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

} // namespace

// ---------------------------------------------------------------------------
// Field

Field::Field(int p, int n) : p_(p), n_(n) {
    if (!is_prime(p)) raise(ErrorKind::CompositeCharacteristic, std::to_string(p) + " is not prime");
    if (n < 1) raise(ErrorKind::InvalidDegree, "extension degree must be >= 1");
    int64_t q = 1;
    for (int i = 0; i < n; ++i) {
        q *= p;
        if (q > kMaxDomainSize) raise(ErrorKind::InvalidArg, "field size exceeds desk scale");
    }
    size_ = (int)q;
    is_field_ = true;
    name_ = n == 1 ? std::to_string(p) : std::to_string(p) + "^" + std::to_string(n);
    modulus_ = smallest_irreducible(p, n);

    add_.resize((size_t)size_ * size_);
    mul_.resize((size_t)size_ * size_);
    neg_.resize(size_);
    inv_.resize(size_);

    auto decode = [&](int v) {
        std::vector<int> c(n_);
        for (int i = 0; i < n_; ++i) {
            c[i] = v % p_;
            v /= p_;
        }
        return c;
    };
    auto encode = [&](const std::vector<int>& c) {
        int v = 0;
        for (int i = (int)c.size() - 1; i >= 0; --i) v = v * p_ + c[i];
        return v;
    };

    for (int a = 0; a < size_; ++a) {
        auto ca = decode(a);
        std::vector<int> cn(n_);
        for (int i = 0; i < n_; ++i) cn[i] = (p_ - ca[i]) % p_;
        neg_[a] = (uint16_t)encode(cn);
        for (int b = 0; b < size_; ++b) {
            auto cb = decode(b);
            std::vector<int> cs(n_);
            for (int i = 0; i < n_; ++i) cs[i] = (ca[i] + cb[i]) % p_;
            add_[(size_t)a * size_ + b] = (uint16_t)encode(cs);
            auto cm = poly_mul_mod(poly_trim(ca), poly_trim(cb), modulus_, p_);
            cm.resize(n_, 0);
            mul_[(size_t)a * size_ + b] = (uint16_t)encode(cm);
        }
    }
    one_ = 1;
    inv_[0] = 0;
    for (int a = 1; a < size_; ++a)
        for (int b = 1; b < size_; ++b)
            if (mul(a, b) == 1) {
                inv_[a] = (uint16_t)b;
                break;
            }
}

const Field& Field::get(int p, int n) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<Field>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{p, n}];
    if (!slot) slot.reset(new Field(p, n));
    return *slot;
}

std::vector<int> Field::coeffs(int v) const {
    std::vector<int> c(n_);
    for (int i = 0; i < n_; ++i) {
        c[i] = v % p_;
        v /= p_;
    }
    return c;
}

int Field::from_coeffs(const std::vector<int>& c) const {
    if ((int)c.size() != n_) raise(ErrorKind::InvalidArg, "coefficient list length != degree");
    int v = 0;
    for (int i = n_ - 1; i >= 0; --i) {
        if (c[i] < 0 || c[i] >= p_) raise(ErrorKind::InvalidArg, "coefficient out of range");
        v = v * p_ + c[i];
    }
    return v;
}

std::string Field::format(int v) const {
    if (n_ == 1) return std::to_string(v);
    return join_ints(coeffs(v));
}

// ---------------------------------------------------------------------------
// MatrixRing

MatrixRing::MatrixRing(int p, int k) : p_(p), k_(k) {
    if (!is_prime(p)) raise(ErrorKind::CompositeCharacteristic, std::to_string(p) + " is not prime");
    if (k < 1) raise(ErrorKind::InvalidArg, "matrix side must be >= 1");
    int64_t q = 1;
    for (int i = 0; i < k * k; ++i) {
        q *= p;
        if (q > kMaxDomainSize) raise(ErrorKind::InvalidArg, "ring size exceeds desk scale");
    }
    size_ = (int)q;
    is_field_ = false;
    name_ = "ring:" + std::to_string(p) + "," + std::to_string(k);

    add_.resize((size_t)size_ * size_);
    mul_.resize((size_t)size_ * size_);
    neg_.resize(size_);
    unit_.assign(size_, 0);

    auto decode = [&](int v) {
        std::vector<int> g(k_ * k_);
        for (int i = 0; i < k_ * k_; ++i) {
            g[i] = v % p_;
            v /= p_;
        }
        return g;
    };
    auto encode = [&](const std::vector<int>& g) {
        int v = 0;
        for (int i = k_ * k_ - 1; i >= 0; --i) v = v * p_ + g[i];
        return v;
    };

    std::vector<int> id(k_ * k_, 0);
    for (int i = 0; i < k_; ++i) id[i * k_ + i] = 1;
    one_ = encode(id);

    for (int a = 0; a < size_; ++a) {
        auto ga = decode(a);
        std::vector<int> gn(k_ * k_);
        for (int i = 0; i < k_ * k_; ++i) gn[i] = (p_ - ga[i]) % p_;
        neg_[a] = (uint16_t)encode(gn);
        for (int b = 0; b < size_; ++b) {
            auto gb = decode(b);
            std::vector<int> gs(k_ * k_), gm(k_ * k_, 0);
            for (int i = 0; i < k_ * k_; ++i) gs[i] = (ga[i] + gb[i]) % p_;
            for (int i = 0; i < k_; ++i)
                for (int j = 0; j < k_; ++j) {
                    int acc = 0;
                    for (int l = 0; l < k_; ++l) acc += ga[i * k_ + l] * gb[l * k_ + j];
                    gm[i * k_ + j] = acc % p_;
                }
            add_[(size_t)a * size_ + b] = (uint16_t)encode(gs);
            mul_[(size_t)a * size_ + b] = (uint16_t)encode(gm);
        }
    }
    for (int a = 0; a < size_; ++a)
        for (int b = 0; b < size_; ++b)
            if (mul(a, b) == one_ && mul(b, a) == one_) {
                unit_[a] = 1;
                break;
            }
}

const MatrixRing& MatrixRing::get(int p, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<MatrixRing>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{p, k}];
    if (!slot) slot.reset(new MatrixRing(p, k));
    return *slot;
}

std::vector<int> MatrixRing::grid(int v) const {
    std::vector<int> g(k_ * k_);
    for (int i = 0; i < k_ * k_; ++i) {
        g[i] = v % p_;
        v /= p_;
    }
    return g;
}

int MatrixRing::from_grid(const std::vector<int>& g) const {
    if ((int)g.size() != k_ * k_) raise(ErrorKind::InvalidArg, "grid size != k*k");
    int v = 0;
    for (int i = k_ * k_ - 1; i >= 0; --i) {
        if (g[i] < 0 || g[i] >= p_) raise(ErrorKind::InvalidArg, "grid entry out of range");
        v = v * p_ + g[i];
    }
    return v;
}

std::string MatrixRing::format(int v) const {
    auto g = grid(v);
    std::string s = "[";
    for (int r = 0; r < k_; ++r) {
        if (r) s += ",";
        std::vector<int> row(g.begin() + r * k_, g.begin() + (r + 1) * k_);
        s += join_ints(row);
    }
    return s + "]";
}

// ---------------------------------------------------------------------------
// FieldElem

FieldElem fe_make(const Field& f, int v) {
    if (v < 0 || v >= f.size()) raise(ErrorKind::InvalidArg, "element index out of range");
    return {&f, v};
}

static void fe_check(FieldElem a, FieldElem b) {
    if (a.field == nullptr || b.field == nullptr || a.field != b.field)
        raise(ErrorKind::FieldMismatch, "elements of different fields");
}

FieldElem fe_add(FieldElem a, FieldElem b) {
    fe_check(a, b);
    return {a.field, a.field->add(a.v, b.v)};
}

FieldElem fe_mul(FieldElem a, FieldElem b) {
    fe_check(a, b);
    return {a.field, a.field->mul(a.v, b.v)};
}

FieldElem fe_neg(FieldElem a) { return {a.field, a.field->neg(a.v)}; }

FieldElem fe_inv(FieldElem a) { return {a.field, a.field->inv(a.v)}; }

std::string fe_to_string(FieldElem a) {
    return a.field->name() + ":" + join_ints(a.field->coeffs(a.v));
}

FieldElem fe_from_string(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) raise(ErrorKind::ParseError, "element literal needs 'p^n:[...]'");
    std::string dom = s.substr(0, colon);
    int p = 0, n = 1;
    auto caret = dom.find('^');
    try {
        if (caret == std::string::npos) {
            p = std::stoi(dom);
        } else {
            p = std::stoi(dom.substr(0, caret));
            n = std::stoi(dom.substr(caret + 1));
        }
    } catch (const std::exception&) {
        raise(ErrorKind::ParseError, "bad field tag in element literal: " + dom);
    }
    const Field& f = Field::get(p, n);
    std::vector<int> c;
    std::string body = s.substr(colon + 1);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        raise(ErrorKind::ParseError, "element literal needs a coefficient list");
    std::stringstream ss(body.substr(1, body.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) c.push_back(std::stoi(tok));
    return {&f, f.from_coeffs(c)};
}

// ---------------------------------------------------------------------------
// Mat

Mat::Mat(const Domain& dom, int rows, int cols)
    : dom_(&dom), rows_(rows), cols_(cols), a_((size_t)rows * cols, 0) {
    if (rows < 0 || cols < 0) raise(ErrorKind::ShapeError, "negative dimensions");
}

Mat Mat::identity(const Domain& dom, int n) {
    Mat m(dom, n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, dom.one());
    return m;
}

Mat Mat::unit(const Domain& dom, int n, int r, int c) {
    Mat m(dom, n, n);
    m.set(r, c, dom.one());
    return m;
}

bool Mat::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](int32_t v) { return v == 0; });
}

bool Mat::operator==(const Mat& o) const {
    return dom_ == o.dom_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

std::string Mat::to_string() const {
    std::string s = "[";
    for (int r = 0; r < rows_; ++r) {
        if (r) s += ",";
        s += "[";
        for (int c = 0; c < cols_; ++c) {
            if (c) s += ",";
            s += dom_->format(at(r, c));
        }
        s += "]";
    }
    return s + "]";
}

static void check_same_dom(const Mat& a, const Mat& b) {
    if (a.dom_ptr() != b.dom_ptr())
        raise(ErrorKind::FieldMismatch, "matrices over different domains");
}

Mat mat_add(const Mat& a, const Mat& b) {
    check_same_dom(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        raise(ErrorKind::ShapeError, "mat_add shape mismatch");
    Mat c(a.dom(), a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int j = 0; j < a.cols(); ++j) c.set(r, j, a.dom().add(a.at(r, j), b.at(r, j)));
    return c;
}

Mat mat_neg(const Mat& a) {
    Mat c(a.dom(), a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int j = 0; j < a.cols(); ++j) c.set(r, j, a.dom().neg(a.at(r, j)));
    return c;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    check_same_dom(a, b);
    if (a.cols() != b.rows()) raise(ErrorKind::ShapeError, "mat_mul shape mismatch");
    const Domain& d = a.dom();
    Mat c(d, a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int j = 0; j < b.cols(); ++j) {
            int acc = 0;
            for (int l = 0; l < a.cols(); ++l) acc = d.add(acc, d.mul(a.at(r, l), b.at(l, j)));
            c.set(r, j, acc);
        }
    return c;
}

Mat mat_scale(int cv, const Mat& a) {
    Mat c(a.dom(), a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int j = 0; j < a.cols(); ++j) c.set(r, j, a.dom().mul(cv, a.at(r, j)));
    return c;
}

Mat mat_hcat(const Mat& a, const Mat& b) {
    check_same_dom(a, b);
    if (a.rows() != b.rows()) raise(ErrorKind::ShapeError, "mat_hcat row mismatch");
    Mat c(a.dom(), a.rows(), a.cols() + b.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int j = 0; j < a.cols(); ++j) c.set(r, j, a.at(r, j));
        for (int j = 0; j < b.cols(); ++j) c.set(r, a.cols() + j, b.at(r, j));
    }
    return c;
}

Mat mat_vcat(const Mat& a, const Mat& b) {
    check_same_dom(a, b);
    if (a.cols() != b.cols()) raise(ErrorKind::ShapeError, "mat_vcat col mismatch");
    Mat c(a.dom(), a.rows() + b.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int j = 0; j < a.cols(); ++j) c.set(r, j, a.at(r, j));
    for (int r = 0; r < b.rows(); ++r)
        for (int j = 0; j < b.cols(); ++j) c.set(a.rows() + r, j, b.at(r, j));
    return c;
}

Mat mat_block_diag(const Mat& a, int copies) {
    if (copies < 1) raise(ErrorKind::InvalidArg, "copies must be >= 1");
    Mat c(a.dom(), a.rows() * copies, a.cols() * copies);
    for (int k = 0; k < copies; ++k)
        for (int r = 0; r < a.rows(); ++r)
            for (int j = 0; j < a.cols(); ++j)
                c.set(k * a.rows() + r, k * a.cols() + j, a.at(r, j));
    return c;
}

Mat mat_submatrix(const Mat& a, int r0, int c0, int rows, int cols) {
    if (r0 < 0 || c0 < 0 || r0 + rows > a.rows() || c0 + cols > a.cols())
        raise(ErrorKind::ShapeError, "submatrix out of range");
    Mat c(a.dom(), rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j < cols; ++j) c.set(r, j, a.at(r0 + r, c0 + j));
    return c;
}

namespace {

void require_field(const Mat& a, const char* op) {
    if (!a.dom().is_field())
        raise(ErrorKind::UnsupportedDomain, std::string(op) + " requires a field domain");
}

// In-place Gaussian elimination to reduced row echelon form. Returns the list
// of pivot columns. Deterministic: first nonzero row per column.
std::vector<int> rref(std::vector<std::vector<int>>& m, const Field& f) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const int rows = (int)m.size(), cols = (int)m[0].size();
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int pr = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(m[rank], m[pr]);
        const int inv = f.inv(m[rank][c]);
        for (int j = c; j < cols; ++j) m[rank][j] = f.mul(inv, m[rank][j]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][c] == 0) continue;
            const int fct = m[r][c];
            for (int j = c; j < cols; ++j)
                m[r][j] = f.sub(m[r][j], f.mul(fct, m[rank][j]));
        }
        pivots.push_back(c);
        ++rank;
    }
    return pivots;
}

std::vector<std::vector<int>> to_rows(const Mat& a) {
    std::vector<std::vector<int>> m(a.rows(), std::vector<int>(a.cols()));
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) m[r][c] = a.at(r, c);
    return m;
}

} // namespace

int mat_rank(const Mat& a) {
    require_field(a, "mat_rank");
    auto m = to_rows(a);
    return (int)rref(m, static_cast<const Field&>(a.dom())).size();
}

int mat_stack_rank(const std::vector<const Mat*>& parts) {
    if (parts.empty()) return 0;
    std::vector<std::vector<int>> m;
    for (const Mat* p : parts) {
        require_field(*p, "mat_stack_rank");
        for (int r = 0; r < p->rows(); ++r) {
            std::vector<int> row(p->cols());
            for (int c = 0; c < p->cols(); ++c) row[c] = p->at(r, c);
            m.push_back(std::move(row));
        }
    }
    return (int)rref(m, static_cast<const Field&>(parts[0]->dom())).size();
}

std::optional<Mat> mat_solve_left(const Mat& A, const Mat& B) {
    require_field(A, "mat_solve_left");
    check_same_dom(A, B);
    if (A.cols() != B.cols()) raise(ErrorKind::ShapeError, "mat_solve_left column mismatch");
    const Field& f = static_cast<const Field&>(A.dom());

    // X*A = B row by row: A^T x^T = b^T. Eliminate once on [A^T | B^T].
    const int n = A.cols(), mcols = A.rows(), k = B.rows();
    std::vector<std::vector<int>> aug(n, std::vector<int>(mcols + k, 0));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < mcols; ++c) aug[r][c] = A.at(c, r);
        for (int c = 0; c < k; ++c) aug[r][mcols + c] = B.at(c, r);
    }
    // Eliminate only on the first mcols columns.
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < mcols && rank < n; ++c) {
        int pr = -1;
        for (int r = rank; r < n; ++r)
            if (aug[r][c] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(aug[rank], aug[pr]);
        const int inv = f.inv(aug[rank][c]);
        for (int j = 0; j < mcols + k; ++j) aug[rank][j] = f.mul(inv, aug[rank][j]);
        for (int r = 0; r < n; ++r) {
            if (r == rank || aug[r][c] == 0) continue;
            const int fct = aug[r][c];
            for (int j = 0; j < mcols + k; ++j)
                aug[r][j] = f.sub(aug[r][j], f.mul(fct, aug[rank][j]));
        }
        pivot_col.push_back(c);
        ++rank;
    }
    // Inconsistent if any zero row of the A^T part has a nonzero rhs.
    for (int r = rank; r < n; ++r)
        for (int c = 0; c < k; ++c)
            if (aug[r][mcols + c] != 0) return std::nullopt;

    Mat X(f, k, mcols);
    for (int i = 0; i < rank; ++i)
        for (int c = 0; c < k; ++c) X.set(c, pivot_col[i], aug[i][mcols + c]);
    return X;
}

Mat mat_rowspace_canon(const Mat& a) {
    require_field(a, "mat_rowspace_canon");
    auto m = to_rows(a);
    const int rank = (int)rref(m, static_cast<const Field&>(a.dom())).size();
    Mat c(a.dom(), rank, a.cols());
    for (int r = 0; r < rank; ++r)
        for (int j = 0; j < a.cols(); ++j) c.set(r, j, m[r][j]);
    return c;
}

// ---------------------------------------------------------------------------
// Matrix literals

namespace {

// Minimal recursive parser for nested integer lists.
struct ListNode {
    bool leaf = false;
    int value = 0;
    std::vector<ListNode> items;
};

ListNode parse_list(const std::string& s, size_t& i) {
    auto skip = [&] { while (i < s.size() && isspace((unsigned char)s[i])) ++i; };
    skip();
    if (i >= s.size()) raise(ErrorKind::ParseError, "unexpected end of matrix literal");
    if (s[i] == '[') {
        ++i;
        ListNode node;
        skip();
        if (i < s.size() && s[i] == ']') {
            ++i;
            return node;
        }
        for (;;) {
            node.items.push_back(parse_list(s, i));
            skip();
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                return node;
            }
            raise(ErrorKind::ParseError, "expected ',' or ']' in matrix literal");
        }
    }
    size_t j = i;
    if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
    while (j < s.size() && isdigit((unsigned char)s[j])) ++j;
    if (j == i) raise(ErrorKind::ParseError, "expected integer in matrix literal");
    ListNode node;
    node.leaf = true;
    node.value = std::stoi(s.substr(i, j - i));
    i = j;
    return node;
}

int element_from_node(const Domain& dom, const ListNode& n) {
    if (auto* f = dynamic_cast<const Field*>(&dom)) {
        if (f->degree() == 1) {
            if (!n.leaf) raise(ErrorKind::ParseError, "prime-field entry must be an integer");
            int v = ((n.value % f->characteristic()) + f->characteristic()) % f->characteristic();
            return v;
        }
        if (n.leaf) raise(ErrorKind::ParseError, "extension-field entry must be a coefficient list");
        std::vector<int> c;
        for (auto& item : n.items) {
            if (!item.leaf) raise(ErrorKind::ParseError, "coefficient must be an integer");
            c.push_back(((item.value % f->characteristic()) + f->characteristic()) % f->characteristic());
        }
        return f->from_coeffs(c);
    }
    auto* r = dynamic_cast<const MatrixRing*>(&dom);
    if (n.leaf) raise(ErrorKind::ParseError, "ring entry must be a k x k grid");
    std::vector<int> g;
    for (auto& row : n.items) {
        if (row.leaf) raise(ErrorKind::ParseError, "ring entry row must be a list");
        for (auto& item : row.items) {
            if (!item.leaf) raise(ErrorKind::ParseError, "ring grid entry must be an integer");
            g.push_back(((item.value % r->characteristic()) + r->characteristic()) % r->characteristic());
        }
    }
    return r->from_grid(g);
}

} // namespace

Mat mat_from_string(const Domain& dom, const std::string& s) {
    size_t i = 0;
    ListNode root = parse_list(s, i);
    while (i < s.size() && isspace((unsigned char)s[i])) ++i;
    if (i != s.size()) raise(ErrorKind::ParseError, "trailing characters after matrix literal");
    if (root.leaf) raise(ErrorKind::ParseError, "matrix literal must be a list of rows");
    const int rows = (int)root.items.size();
    int cols = -1;
    for (auto& row : root.items) {
        if (row.leaf) raise(ErrorKind::ParseError, "matrix row must be a list");
        if (cols < 0)
            cols = (int)row.items.size();
        else if ((int)row.items.size() != cols)
            raise(ErrorKind::ParseError, "ragged matrix literal");
    }
    Mat m(dom, rows, std::max(cols, 0));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.set(r, c, element_from_node(dom, root.items[r].items[c]));
    return m;
}

} // namespace vlnc
