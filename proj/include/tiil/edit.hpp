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

#pragma once

#include "tiil/backend.hpp"
#include "tiil/maskgen.hpp"
#include "tiil/tensor.hpp"

namespace tiil {

struct EditResult {
  DiffMap difference;
  BinaryMask intermediate_mask;  // M'
  ImageTensor edited_image;      // I_edt
  // M' was empty, so the image was returned untouched.
  bool no_edit = false;
};

// M' from the noise difference between E_aln and E0, then the image with M'
// repainted under E0.
EditResult edit_image(const ImageTensor& image, const TokenEmbeddingMatrix& e0,
                      const TokenEmbeddingMatrix& e_aln, const BackendBundle& bundle,
                      const MaskGenConfig& cfg);

}  // namespace tiil
