# Copyright 2026 The Triad Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Train LeNet-small on the 5k MNIST subset and export it for triad.

Writes into tests/data:
  lenet_small.graph.json, lenet_small.weights.bin
  mnist_val500.f32 / .u8    (scale selection)
  mnist_test200.f32 / .u8   (end-to-end evaluation)

The input file holds one image per row: 784 pixels (0..255) then the label.
"""

import argparse
import json
import pathlib
import struct

import numpy as np
import torch
from torch import nn


class LeNetSmall(nn.Module):
    def __init__(self):
        super().__init__()
        self.conv1 = nn.Conv2d(1, 16, 5)
        self.conv2 = nn.Conv2d(16, 16, 5)
        self.fc1 = nn.Linear(256, 100)
        self.fc2 = nn.Linear(100, 10)
        self.pool = nn.MaxPool2d(2)

    def forward(self, x):
        x = self.pool(torch.relu(self.conv1(x)))
        x = self.pool(torch.relu(self.conv2(x)))
        # Flatten in HWC order to match the exported graph.
        x = x.permute(0, 2, 3, 1).flatten(1)
        return self.fc2(torch.relu(self.fc1(x)))


def split(data, seed):
    rng = np.random.default_rng(seed)
    idx = rng.permutation(len(data))
    test, val, train = idx[:200], idx[200:700], idx[700:]
    return data[train], data[val], data[test]


def tensors(rows):
    x = rows[:, :784].astype(np.float32) / 255.0
    return x.reshape(-1, 28, 28, 1), rows[:, 784].astype(np.uint8)


def graph():
    t = lambda name, dims: {"name": name, "dims": dims}
    n = lambda op, ins, out, **attrs: {"op": op, "inputs": ins, "output": out, **({"attrs": attrs} if attrs else {})}
    return {
        "tensors": [t("x", [28, 28, 1]), t("F1", [5, 5, 1, 16]), t("c1", [16]), t("F2", [5, 5, 16, 16]),
                    t("c2", [16]), t("W1", [256, 100]), t("b1", [100]), t("W2", [100, 10]), t("b2", [10])],
        "nodes": [
            n("Conv", ["x", "F1"], "h1", strides=[1, 1], padding="VALID"),
            n("MatAdd", ["h1", "c1"], "a1"),
            n("ReLU", ["a1"], "r1"),
            n("MaxPool", ["r1"], "p1", pool=[2, 2], strides=[2, 2]),
            n("Conv", ["p1", "F2"], "h2", strides=[1, 1], padding="VALID"),
            n("MatAdd", ["h2", "c2"], "a2"),
            n("ReLU", ["a2"], "r2"),
            n("MaxPool", ["r2"], "p2", pool=[2, 2], strides=[2, 2]),
            n("Reshape", ["p2"], "f", shape=[1, 256]),
            n("MatMul", ["f", "W1"], "h3"),
            n("MatAdd", ["h3", "b1"], "a3"),
            n("ReLU", ["a3"], "r3"),
            n("MatMul", ["r3", "W2"], "h4"),
            n("MatAdd", ["h4", "b2"], "logits"),
            n("ArgMax", ["logits"], "label"),
        ],
        "input": "x",
        "output": "label",
    }


def weights_bytes(model):
    hwio = lambda w: w.detach().permute(2, 3, 1, 0).numpy()
    params = {
        "F1": hwio(model.conv1.weight), "c1": model.conv1.bias.detach().numpy(),
        "F2": hwio(model.conv2.weight), "c2": model.conv2.bias.detach().numpy(),
        "W1": model.fc1.weight.detach().numpy().T, "b1": model.fc1.bias.detach().numpy(),
        "W2": model.fc2.weight.detach().numpy().T, "b2": model.fc2.bias.detach().numpy(),
    }
    out = bytearray()
    for name, arr in params.items():
        arr = np.ascontiguousarray(arr, dtype="<f4")
        out += struct.pack("<I", len(name)) + name.encode()
        out += struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape)
        out += arr.tobytes()
    return bytes(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default="/tmp/mnist5k.npy")
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"))
    ap.add_argument("--epochs", type=int, default=12)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    torch.manual_seed(args.seed)
    torch.use_deterministic_algorithms(True)
    train, val, test = split(np.load(args.data), args.seed)
    xtr, ytr = tensors(train)
    xt = torch.from_numpy(xtr).permute(0, 3, 1, 2)
    yt = torch.from_numpy(ytr.astype(np.int64))

    model = LeNetSmall()
    opt = torch.optim.Adam(model.parameters(), lr=2e-3)
    for epoch in range(args.epochs):
        perm = torch.randperm(len(xt))
        for i in range(0, len(xt), 64):
            b = perm[i:i + 64]
            opt.zero_grad()
            loss = nn.functional.cross_entropy(model(xt[b]), yt[b])
            loss.backward()
            opt.step()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model.eval()
    with torch.no_grad():
        for name, rows in (("val500", val), ("test200", test)):
            x, y = tensors(rows)
            acc = (model(torch.from_numpy(x).permute(0, 3, 1, 2)).argmax(1).numpy() == y).mean()
            print(f"{name}: float accuracy {acc:.4f}")
            x.astype("<f4").tofile(out / f"mnist_{name}.f32")
            y.tofile(out / f"mnist_{name}.u8")
    (out / "lenet_small.graph.json").write_text(json.dumps(graph(), indent=1) + "\n")
    (out / "lenet_small.weights.bin").write_bytes(weights_bytes(model))


if __name__ == "__main__":
    main()
