#pragma once

// Convolution, pooling and rectifier kernels on C x H x W float planes.
//
// Each kernel exists twice: the OpenMP version in `xguide::kernels` and a
// plain serial version in `xguide::kernels::reference`. Both accumulate every
// output element in the same order, so their results agree bit-for-bit for
// any thread count.

#include <cstddef>
#include <cstdint>
#include <span>

namespace xguide::kernels {

struct Dims {
  std::size_t channels;
  std::size_t height;
  std::size_t width;
  std::size_t plane() const { return height * width; }
  std::size_t size() const { return channels * height * width; }
};

// 3x3 "same" convolution with zero padding.
// in: dims.channels planes; weight: filters x channels x 3 x 3; out: filters planes.
void conv3x3_forward(std::span<const float> in, Dims dims, std::span<const float> weight,
                     std::span<const float> bias, std::size_t filters, std::span<float> out);

// Gradient with respect to the convolution input.
void conv3x3_backward_input(std::span<const float> grad_out, Dims dims, std::span<const float> weight,
                            std::size_t filters, std::span<float> grad_in);

// Gradients with respect to weight and bias (overwritten, not accumulated).
void conv3x3_backward_params(std::span<const float> in, Dims dims, std::span<const float> grad_out,
                             std::size_t filters, std::span<float> grad_weight, std::span<float> grad_bias);

// 2x2 max pool, stride 2; odd trailing rows/columns are dropped. `argmax`
// receives the in-plane index of each winner (first maximum in scan order).
void maxpool2x2_forward(std::span<const float> in, Dims dims, std::span<float> out,
                        std::span<std::uint32_t> argmax);

void maxpool2x2_backward(std::span<const float> grad_out, Dims dims, std::span<const std::uint32_t> argmax,
                         std::span<float> grad_in);

void relu_forward(std::span<const float> in, std::span<float> out);
// Subgradient at 0 is 0.
void relu_backward(std::span<const float> pre_activation, std::span<const float> grad_out,
                   std::span<float> grad_in);

namespace reference {

void conv3x3_forward(std::span<const float> in, Dims dims, std::span<const float> weight,
                     std::span<const float> bias, std::size_t filters, std::span<float> out);
void conv3x3_backward_input(std::span<const float> grad_out, Dims dims, std::span<const float> weight,
                            std::size_t filters, std::span<float> grad_in);
void conv3x3_backward_params(std::span<const float> in, Dims dims, std::span<const float> grad_out,
                             std::size_t filters, std::span<float> grad_weight, std::span<float> grad_bias);
void maxpool2x2_forward(std::span<const float> in, Dims dims, std::span<float> out,
                        std::span<std::uint32_t> argmax);
void maxpool2x2_backward(std::span<const float> grad_out, Dims dims, std::span<const std::uint32_t> argmax,
                         std::span<float> grad_in);

}  // namespace reference

}  // namespace xguide::kernels
