# Copyright 2026 The tsplab Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""scalefree holds the gadget constructions and the experiments run on them.

- :mod:`.gadgets` and :mod:`.providers` build the point configurations
- :mod:`.localsim` predicts the local paths of each heuristic
- :mod:`.analysis`, :mod:`.copies`, :mod:`.classify` and :mod:`.decider`
  run the measurements

"""

from __future__ import absolute_import
