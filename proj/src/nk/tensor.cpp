#include "cq/nk/tensor.hpp"

#include <cmath>
#include <sstream>

namespace cq::nk {

std::size_t numel(const Shape& shape)
{
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, float fill) : shape_(std::move(shape)), data_(numel(shape_), fill)
{
    for (auto d : shape_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive: " + shape_str(shape_));
    }
}

Tensor::Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data))
{
    if (data_.size() != numel(shape_)) {
        throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                         shape_str(shape_));
    }
}

std::size_t Tensor::dim(std::size_t axis) const
{
    if (axis >= shape_.size()) throw ShapeError("axis out of range for shape " + shape_str(shape_));
    return shape_[axis];
}

Tensor Tensor::reshaped(Shape shape) const
{
    if (numel(shape) != data_.size()) {
        throw ShapeError("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
    }
    return Tensor(std::move(shape), data_);
}

void Tensor::fill(float value)
{
    std::fill(data_.begin(), data_.end(), value);
}

bool Tensor::all_finite() const
{
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Tensor& Tensor::operator+=(const Tensor& other)
{
    require_same_shape(*this, other, "tensor +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor& Tensor::operator*=(float s)
{
    for (auto& v : data_) v *= s;
    return *this;
}

void require_shape(const Tensor& t, const Shape& expected, const char* what)
{
    if (t.shape() != expected) {
        throw ShapeError(std::string(what) + ": expected " + shape_str(expected) + ", got " + shape_str(t.shape()));
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what)
{
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(what) + ": " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
}

}  // namespace cq::nk
