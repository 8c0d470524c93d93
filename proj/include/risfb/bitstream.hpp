// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_BITSTREAM_HPP
#define RISFB_BITSTREAM_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace risfb {

/// MSB-first bit packer for the feedback payload wire format.
class BitWriter {
public:
    void put(std::uint64_t value, int bits) {
        if (bits < 0 || bits > 63)
            throw std::invalid_argument("bit width out of range");
        if (bits < 64 && value >> bits)
            throw std::invalid_argument("value does not fit in the declared bit width");
        for (int i = bits - 1; i >= 0; --i)
            put_bit((value >> i) & 1u);
    }

    void put_bit(bool b) {
        if (bit_pos_ == 0)
            bytes_.push_back(0);
        if (b)
            bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - bit_pos_));
        bit_pos_ = (bit_pos_ + 1) % 8;
    }

    std::size_t bit_count() const { return bytes_.size() * 8 - (bit_pos_ ? 8 - bit_pos_ : 0); }
    const std::vector<std::uint8_t> &bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    int bit_pos_ = 0;
};

/// MSB-first bit reader matching BitWriter.
class BitReader {
public:
    explicit BitReader(const std::vector<std::uint8_t> &bytes) : bytes_(bytes) {}

    std::uint64_t get(int bits) {
        std::uint64_t v = 0;
        for (int i = 0; i < bits; ++i)
            v = (v << 1) | (get_bit() ? 1u : 0u);
        return v;
    }

    bool get_bit() {
        if (pos_ >= bytes_.size() * 8)
            throw std::out_of_range("bit stream exhausted");
        bool b = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
        ++pos_;
        return b;
    }

    std::size_t position() const { return pos_; }

private:
    const std::vector<std::uint8_t> &bytes_;
    std::size_t pos_ = 0;
};

} // namespace risfb

#endif
