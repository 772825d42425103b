from .dataset import Dataset, Split, load_dataset, make_dataset, save_dataset
from .metrics import batch_scores, psnr, ssim
from .phantoms import gen_phantom, phantom_source
