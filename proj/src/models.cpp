// Copyright 2026 The cvnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvnn/models.hpp"

#include <stdexcept>

namespace cvnn {

namespace {

template <typename Layer>
void append_params(std::vector<Parameter*>& out, Layer& layer) {
  for (Parameter* p : layer.parameters()) out.push_back(p);
}

}  // namespace

ComplexMlp::ComplexMlp(const std::string& name, const std::vector<std::size_t>& widths,
                       double slope, Rng& rng, Backend backend)
    : slope_(slope) {
  if (widths.size() < 2) throw std::invalid_argument("ComplexMlp: need at least two widths");
  layers_.reserve(widths.size() - 1);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    layers_.emplace_back(name + "." + std::to_string(i), widths[i], widths[i + 1], true, rng,
                         backend);
  }
}

Var ComplexMlp::forward(Tape& tape, Var z) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    z = layers_[i].forward(tape, z);
    if (i + 1 < layers_.size()) z = split_leaky_relu(z, slope_);
  }
  return z;
}

std::vector<Parameter*> ComplexMlp::parameters() {
  std::vector<Parameter*> p;
  for (auto& l : layers_) append_params(p, l);
  return p;
}

void ComplexMlp::set_backend(Backend b) {
  for (auto& l : layers_) l.set_backend(b);
}

RealMlp::RealMlp(const std::string& name, const std::vector<std::size_t>& widths, double slope,
                 Rng& rng)
    : slope_(slope) {
  if (widths.size() < 2) throw std::invalid_argument("RealMlp: need at least two widths");
  layers_.reserve(widths.size() - 1);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    layers_.emplace_back(name + "." + std::to_string(i), widths[i], widths[i + 1], true, rng);
  }
}

Var RealMlp::forward(Tape& tape, Var x) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(tape, x);
    if (i + 1 < layers_.size()) x = split_leaky_relu(x, slope_);
  }
  return x;
}

std::vector<Parameter*> RealMlp::parameters() {
  std::vector<Parameter*> p;
  for (auto& l : layers_) append_params(p, l);
  return p;
}

ConvNeXtBlock::ConvNeXtBlock(const std::string& name, std::size_t dim, std::size_t kernel,
                             Rng& rng, Backend backend)
    : dwconv_(name + ".dwconv",
              ConvGeometry::conv1d(dim, dim, kernel, 1, kernel / 2, 1, dim), true, rng, backend),
      norm_(name + ".norm", dim),
      pw1_(name + ".pw1", dim, 3 * dim, true, rng, backend),
      pw2_(name + ".pw2", 3 * dim, dim, true, rng, backend) {
  if (kernel % 2 == 0) throw std::invalid_argument("ConvNeXtBlock: kernel must be odd");
}

Var ConvNeXtBlock::forward(Tape& tape, Var x) {
  Var h = dwconv_.forward(tape, x);
  h = transpose_last2(h);  // [B, L, dim]
  h = norm_.forward(tape, h);
  h = pw1_.forward(tape, h);
  h = split_gelu(h);
  h = pw2_.forward(tape, h);
  h = transpose_last2(h);
  return add(x, h);
}

std::vector<Parameter*> ConvNeXtBlock::parameters() {
  std::vector<Parameter*> p;
  append_params(p, dwconv_);
  append_params(p, norm_);
  append_params(p, pw1_);
  append_params(p, pw2_);
  return p;
}

void ConvNeXtBlock::set_backend(Backend b) {
  dwconv_.set_backend(b);
  pw1_.set_backend(b);
  pw2_.set_backend(b);
}

ComplexGenerator::ComplexGenerator(const GeneratorShape& shape, Rng& rng, Backend backend)
    : stem_("stem",
            ConvGeometry::conv1d(shape.in_channels, shape.dim, shape.kernel, 1, shape.kernel / 2),
            true, rng, backend),
      pq_(shape.pq_levels),
      norm_("final_norm", shape.dim),
      head_("head", shape.dim, shape.bins, true, rng, backend),
      exp_output_(shape.exp_output) {
  blocks_.reserve(shape.layers);
  for (std::size_t i = 0; i < shape.layers; ++i) {
    blocks_.emplace_back("block" + std::to_string(i), shape.dim, shape.kernel, rng, backend);
  }
}

Var ComplexGenerator::forward(Tape& tape, Var features) {
  Var h = stem_.forward(tape, features);
  h = pq_.forward(h);
  for (auto& block : blocks_) h = block.forward(tape, h);
  h = transpose_last2(h);  // [1, frames, dim]
  h = norm_.forward(tape, h);
  h = head_.forward(tape, h);  // [1, frames, bins]
  const Shape& s = h.shape();
  Var spec = reshape(h, Shape{s[1], s[2]});
  return exp_output_ ? exp(spec) : spec;
}

std::vector<Parameter*> ComplexGenerator::parameters() {
  std::vector<Parameter*> p;
  append_params(p, stem_);
  for (auto& block : blocks_) append_params(p, block);
  append_params(p, norm_);
  append_params(p, head_);
  return p;
}

void ComplexGenerator::set_backend(Backend b) {
  stem_.set_backend(b);
  for (auto& block : blocks_) block.set_backend(b);
  head_.set_backend(b);
}

MultiScaleDiscriminator::MultiScaleDiscriminator(const std::vector<Scale>& scales, double slope,
                                                 Rng& rng, Backend backend)
    : slope_(slope) {
  for (std::size_t s = 0; s < scales.size(); ++s) {
    std::vector<ComplexConv2d> stack;
    stack.reserve(scales[s].convs.size());
    for (std::size_t l = 0; l < scales[s].convs.size(); ++l) {
      stack.emplace_back("disc" + std::to_string(s) + ".conv" + std::to_string(l),
                         scales[s].convs[l], true, rng, backend);
    }
    stacks_.push_back(std::move(stack));
  }
}

std::vector<Var> MultiScaleDiscriminator::forward(Tape& tape, const std::vector<Var>& inputs) {
  if (inputs.size() != stacks_.size()) {
    throw std::invalid_argument("MultiScaleDiscriminator: expected " +
                                std::to_string(stacks_.size()) + " inputs");
  }
  std::vector<Var> outputs;
  for (std::size_t s = 0; s < stacks_.size(); ++s) {
    Var h = inputs[s];
    for (std::size_t l = 0; l < stacks_[s].size(); ++l) {
      h = stacks_[s][l].forward(tape, h);
      if (l + 1 < stacks_[s].size()) h = split_leaky_relu(h, slope_);
    }
    outputs.push_back(h);
  }
  return outputs;
}

std::vector<Parameter*> MultiScaleDiscriminator::parameters() {
  std::vector<Parameter*> p;
  for (auto& stack : stacks_) {
    for (auto& conv : stack) append_params(p, conv);
  }
  return p;
}

void MultiScaleDiscriminator::set_backend(Backend b) {
  for (auto& stack : stacks_) {
    for (auto& conv : stack) conv.set_backend(b);
  }
}

std::size_t count_scalars(const std::vector<Parameter*>& params, bool complex_valued) {
  std::size_t n = 0;
  for (const Parameter* p : params) n += p->value.numel();
  return complex_valued ? 2 * n : n;
}

}  // namespace cvnn
