#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vlnc/error.hpp"

namespace vlnc {

// A finite coefficient domain with elements addressed by index in [0, size()).
// Index 0 is the additive identity. Concrete domains are interned: Field::get
// and MatrixRing::get return references with process lifetime, so raw pointers
// can be stored and compared for identity.
class Domain {
public:
    virtual ~Domain() = default;

    int size() const { return size_; }
    bool is_field() const { return is_field_; }

    int add(int a, int b) const { return add_[a * size_ + b]; }
    int mul(int a, int b) const { return mul_[a * size_ + b]; }
    int neg(int a) const { return neg_[a]; }
    int sub(int a, int b) const { return add(a, neg(b)); }
    int zero() const { return 0; }
    int one() const { return one_; }

    // Domain tag used in file formats, e.g. "2", "3^2", "ring:2,2".
    const std::string& name() const { return name_; }
    // Element literal used inside matrix literals.
    virtual std::string format(int v) const = 0;

protected:
    int size_ = 0;
    int one_ = 0;
    bool is_field_ = false;
    std::string name_;
    std::vector<uint16_t> add_, mul_;
    std::vector<uint16_t> neg_;
};

// GF(p^n) in polynomial residue representation. The element with index v has
// coefficient vector digits of v in base p, low degree first. The modulus is
// the lexicographically smallest monic irreducible polynomial of degree n
// (coefficient lists compared low-to-high), so serialized values are stable.
class Field final : public Domain {
public:
    static const Field& get(int p, int n);

    int characteristic() const { return p_; }
    int degree() const { return n_; }
    // Length n+1, low-to-high, monic.
    const std::vector<int>& modulus() const { return modulus_; }

    int inv(int a) const {
        if (a == 0) raise(ErrorKind::DivisionByZero, "inverse of zero in GF(" + name() + ")");
        return inv_[a];
    }

    std::vector<int> coeffs(int v) const;
    int from_coeffs(const std::vector<int>& c) const;

    std::string format(int v) const override;

private:
    Field(int p, int n);
    int p_, n_;
    std::vector<int> modulus_;
    std::vector<uint16_t> inv_;
};

// Full ring of k x k matrices over Z_p, used as a scalar alphabet. For k >= 2
// it is non-commutative; p=2, k=2 is the 16-element ring. Element index v
// encodes the grid row-major in base p.
class MatrixRing final : public Domain {
public:
    static const MatrixRing& get(int p, int k);

    int characteristic() const { return p_; }
    int side() const { return k_; }

    // Grid accessors, row-major k x k of residues mod p.
    std::vector<int> grid(int v) const;
    int from_grid(const std::vector<int>& g) const;

    bool is_unit(int v) const { return unit_[v] != 0; }

    std::string format(int v) const override;

private:
    MatrixRing(int p, int k);
    int p_, k_;
    std::vector<uint8_t> unit_;
};

// Scalar value with its domain attached; the checked element-level interface.
struct FieldElem {
    const Field* field = nullptr;
    int v = 0;

    bool operator==(const FieldElem&) const = default;
};

FieldElem fe_make(const Field& f, int v);
FieldElem fe_add(FieldElem a, FieldElem b);
FieldElem fe_mul(FieldElem a, FieldElem b);
FieldElem fe_neg(FieldElem a);
FieldElem fe_inv(FieldElem a);
// "p^n:[c0,c1,...]"
std::string fe_to_string(FieldElem a);
FieldElem fe_from_string(const std::string& s);

// Dense matrix over a Domain; entries are element indices.
class Mat {
public:
    Mat() = default;
    Mat(const Domain& dom, int rows, int cols);
    static Mat identity(const Domain& dom, int n);
    static Mat unit(const Domain& dom, int n, int r, int c); // single 1 at (r,c)

    const Domain& dom() const { return *dom_; }
    const Domain* dom_ptr() const { return dom_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    int at(int r, int c) const { return a_[r * cols_ + c]; }
    void set(int r, int c, int v) { a_[r * cols_ + c] = v; }

    bool is_zero() const;
    bool operator==(const Mat& o) const;
    bool operator!=(const Mat& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    const Domain* dom_ = nullptr;
    int rows_ = 0, cols_ = 0;
    std::vector<int32_t> a_;
};

Mat mat_add(const Mat& a, const Mat& b);
Mat mat_neg(const Mat& a);
// Left-multiplication convention: (a*b) applied to a column vector is a(b(x)).
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_scale(int c, const Mat& a); // c * a, c a domain element index

// Horizontal / vertical concatenation.
Mat mat_hcat(const Mat& a, const Mat& b);
Mat mat_vcat(const Mat& a, const Mat& b);
Mat mat_block_diag(const Mat& a, int copies);
Mat mat_submatrix(const Mat& a, int r0, int c0, int rows, int cols);

// Row rank by Gaussian elimination; fields only. Pivot rule: columns scanned
// left to right, first row with a nonzero entry wins.
int mat_rank(const Mat& a);

// Solves X * A = B exactly over a field; returns the unique-or-first solution
// with free variables set to zero, or nullopt when none exists.
std::optional<Mat> mat_solve_left(const Mat& A, const Mat& B);

// Reduced row echelon form with zero rows dropped; canonical for the row
// space, used for dedup and subspace comparison. Fields only.
Mat mat_rowspace_canon(const Mat& a);

// rank of [a; b] etc. without materializing the stack more than once.
int mat_stack_rank(const std::vector<const Mat*>& parts);

// Parses a (possibly nested) matrix literal like "[[1,0],[0,1]]" for the given
// domain; inverse of Mat::to_string.
Mat mat_from_string(const Domain& dom, const std::string& s);

bool is_prime(int p);

} // namespace vlnc
