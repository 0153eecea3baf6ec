# ========================================================================== #
#                                                                            #
#    SPLITFSS - Split learning with function secret sharing.                 #
#                                                                            #
#    Copyright (C) 2024  SplitFSS developers                                 #
#                                                                            #
#    This program is free software: you can redistribute it and/or modify    #
#    it under the terms of the GNU General Public License as published by    #
#    the Free Software Foundation, either version 3 of the License, or       #
#    (at your option) any later version.                                     #
#                                                                            #
#    This program is distributed in the hope that it will be useful,         #
#    but WITHOUT ANY WARRANTY; without even the implied warranty of          #
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the           #
#    GNU General Public License for more details.                            #
#                                                                            #
#    You should have received a copy of the GNU General Public License       #
#    along with this program.  If not, see <https://www.gnu.org/licenses/>.  #
#                                                                            #
# ========================================================================== #


import numpy as np

from numpy.lib.stride_tricks import sliding_window_view

from . import Numerics


# =====
class LayerShapeError(ValueError):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise LayerShapeError(msg)


# ===== Conv2D: stride 1, no padding
def im2col(x: np.ndarray, kernel: int) -> np.ndarray:
    """ [n, C, H, W] -> [n * Ho * Wo, C * k * k], rows ordered (n, i, j), columns (c, ki, kj). """

    (n, chans, height, width) = x.shape
    _check((height >= kernel and width >= kernel), f"Input {height}x{width} is smaller than kernel {kernel}")
    windows = sliding_window_view(x, (kernel, kernel), axis=(2, 3))  # [n, C, Ho, Wo, k, k]
    (out_h, out_w) = windows.shape[2:4]
    return windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * out_h * out_w, chans * kernel * kernel)


def col2im(cols: np.ndarray, x_shape: tuple[int, ...], kernel: int) -> np.ndarray:
    (n, chans, height, width) = x_shape
    (out_h, out_w) = (height - kernel + 1, width - kernel + 1)
    cols = cols.reshape(n, out_h, out_w, chans, kernel, kernel)
    x = np.zeros(x_shape, dtype=cols.dtype)
    for ki in range(kernel):
        for kj in range(kernel):
            x[:, :, ki:ki + out_h, kj:kj + out_w] += cols[:, :, :, :, ki, kj].transpose(0, 3, 1, 2)
    return x


def conv2d(
    x: np.ndarray,
    kernels: np.ndarray,
    bias: np.ndarray,
    num: Numerics,
) -> tuple[np.ndarray, np.ndarray]:

    _check((x.ndim == 4), f"Conv input must be [n, C, H, W], got {x.shape}")
    (out_c, in_c, kernel, kernel_w) = kernels.shape
    _check((kernel == kernel_w), "Only square kernels are supported")
    _check((x.shape[1] == in_c), f"Conv input has {x.shape[1]} channels, kernels expect {in_c}")
    _check((bias.shape == (out_c,)), f"Conv bias shape {bias.shape} != ({out_c},)")

    cols = im2col(x, kernel)
    (n, out_h, out_w) = (x.shape[0], x.shape[2] - kernel + 1, x.shape[3] - kernel + 1)
    y = num.truncate(cols @ kernels.reshape(out_c, -1).T) + bias
    return (y.reshape(n, out_h, out_w, out_c).transpose(0, 3, 1, 2), cols)


def conv2d_backward(
    dy: np.ndarray,
    cols: np.ndarray,
    kernels: np.ndarray,
    x_shape: tuple[int, ...],
    num: Numerics,
    need_input_grad: bool=True,
) -> tuple[(np.ndarray | None), np.ndarray, np.ndarray]:

    out_c = kernels.shape[0]
    dy2 = dy.transpose(0, 2, 3, 1).reshape(-1, out_c)
    dw = num.truncate(dy2.T @ cols).reshape(kernels.shape)
    db = num.sum(dy2, axis=0)
    dx: (np.ndarray | None) = None
    if need_input_grad:
        dcols = num.truncate(dy2 @ kernels.reshape(out_c, -1))
        dx = col2im(dcols, x_shape, kernels.shape[2])
    return (dx, dw, db)


# ===== Max-pooling 2x2, stride 2
def pool_windows(x: np.ndarray) -> np.ndarray:
    """ [n, C, H, W] -> [n, C, H/2, W/2, 4], window positions in row-major order. """

    (n, chans, height, width) = x.shape
    _check((height % 2 == 0 and width % 2 == 0), f"Max-pooling needs even spatial dims, got {height}x{width}")
    return x.reshape(n, chans, height // 2, 2, width // 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, chans, height // 2, width // 2, 4)


def unpool_windows(windows: np.ndarray) -> np.ndarray:
    (n, chans, half_h, half_w) = windows.shape[:4]
    return windows.reshape(n, chans, half_h, half_w, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, chans, half_h * 2, half_w * 2)


def maxpool2(x: np.ndarray, num: Numerics) -> tuple[np.ndarray, np.ndarray]:
    windows = pool_windows(x)
    index = np.argmax(num.to_signed(windows), axis=-1)
    y = np.take_along_axis(windows, index[..., None], axis=-1)[..., 0]
    return (y, index)


def maxpool2_backward(dy: np.ndarray, index: np.ndarray) -> np.ndarray:
    windows = np.zeros(dy.shape + (4,), dtype=dy.dtype)
    np.put_along_axis(windows, index[..., None], dy[..., None], axis=-1)
    return unpool_windows(windows)


# ===== ReLU
def relu_mask(x: np.ndarray, num: Numerics) -> np.ndarray:
    return (num.to_signed(x) >= 0)


def relu(x: np.ndarray, num: Numerics) -> np.ndarray:
    return np.where(relu_mask(x, num), x, num.zeros(()))


def relu_backward(dy: np.ndarray, x: np.ndarray, num: Numerics) -> np.ndarray:
    return np.where(relu_mask(x, num), dy, num.zeros(()))


# ===== Fully connected
def fc(x: np.ndarray, weight: np.ndarray, bias: np.ndarray, num: Numerics) -> np.ndarray:
    x2 = x.reshape(x.shape[0], -1) if x.ndim > 1 else x[None, :]
    _check((weight.ndim == 2 and x2.shape[1] == weight.shape[1]), f"FC input width {x2.shape[1]} != weight {weight.shape}")
    _check((bias.shape == (weight.shape[0],)), f"FC bias shape {bias.shape} != ({weight.shape[0]},)")
    y = num.truncate(x2 @ weight.T) + bias
    return (y if x.ndim > 1 else y[0])


def fc_backward(
    dy: np.ndarray,
    x: np.ndarray,
    weight: np.ndarray,
    num: Numerics,
    need_input_grad: bool=True,
) -> tuple[(np.ndarray | None), np.ndarray, np.ndarray]:

    x2 = x.reshape(x.shape[0], -1)
    dw = num.truncate(dy.T @ x2)
    db = num.sum(dy, axis=0)
    dx = (num.truncate(dy @ weight).reshape(x.shape) if need_input_grad else None)
    return (dx, dw, db)
