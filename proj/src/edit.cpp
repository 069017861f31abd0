/* Copyright 2026 The TIIL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tiil/edit.hpp"

namespace tiil {

EditResult edit_image(const ImageTensor& image, const TokenEmbeddingMatrix& e0,
                      const TokenEmbeddingMatrix& e_aln, const BackendBundle& bundle,
                      const MaskGenConfig& cfg) {
  DiffMap diff = noise_difference_map(image, e_aln, e0, bundle, cfg);
  BinaryMask mask = binarize_mask(diff, cfg);
  if (mask.empty()) return {std::move(diff), std::move(mask), image, true};
  ImageTensor edited = bundle.inpainter->inpaint(image, mask, e0);
  return {std::move(diff), std::move(mask), std::move(edited), false};
}

}  // namespace tiil
