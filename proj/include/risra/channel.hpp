#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "risra/model.hpp"
#include "risra/rng.hpp"

namespace risra {

using cplx = std::complex<double>;

/// Row-major dense matrix.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const T> data() const noexcept { return data_; }
    std::span<T> data() noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Fading state of the granted users for one RR round.
struct ChannelRealization {
    std::size_t n_users = 0;
    std::size_t n_subchannels = 0;
    std::size_t n_elements = 0;
    /// [users x C] direct gains h_d.
    Matrix<cplx> direct;
    /// [users x C x M] cascaded products f*g, flattened with element fastest.
    std::vector<cplx> cascaded;

    std::span<const cplx> elements(std::size_t user, std::size_t channel) const
    {
        return {cascaded.data() + (user * n_subchannels + channel) * n_elements, n_elements};
    }

    bool operator==(const ChannelRealization&) const = default;
};

/// Effective cascaded gains under one grouping level.
struct GroupedGains {
    int level = 0;
    std::size_t n_users = 0;
    std::size_t n_subchannels = 0;
    std::size_t n_groups = 0; // 2^level
    std::vector<cplx> gains;

    std::span<const cplx> at(std::size_t user, std::size_t channel) const
    {
        return {gains.data() + (user * n_subchannels + channel) * n_groups, n_groups};
    }
};

/// CN(0, variance) draw.
cplx sample_cscg(Rng& rng, double variance);

/// Direct gains for n_users granted users: [n_users x C].
Matrix<cplx> sample_direct(Rng& rng, std::size_t n_users, const SystemConfig& config,
                           const DerivedParams& derived);

/// Fills `out` (length M) with i.i.d. cascaded products f*g; zeros when the
/// RIS is disabled.
void sample_cascaded(Rng& rng, const SystemConfig& config, const DerivedParams& derived,
                     std::span<cplx> out);

/// Full realization: direct gains first, then cascaded products in
/// (user, channel, element) order.
ChannelRealization sample_realization(Rng& rng, std::size_t n_granted, const SystemConfig& config,
                                      const DerivedParams& derived);

/// Block sums of consecutive elements: out[u] = sum of elements
/// [u*B, (u+1)*B) with B = M / 2^level. `out` must have 2^level entries.
void group_elements(std::span<const cplx> elements, int level, std::span<cplx> out);

/// Grouped effective cascaded gains at `level`. Throws LevelOutOfRange
/// unless 1 <= level <= log2(M).
GroupedGains group(const ChannelRealization& realization, int level);

/// Columnar dump, one line per coefficient: user channel element re im.
/// Element 0 is the direct gain, 1..M the cascaded products.
void write_realization(std::ostream& os, const ChannelRealization& realization);

} // namespace risra
