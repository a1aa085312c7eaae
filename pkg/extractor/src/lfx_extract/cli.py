"""Command-line entry point: lfx-extract VIDEO -o OUT.csv"""

from __future__ import annotations

import sys

import click

from .extract import ExtractConfig, UnreadableVideo, extract_video


@click.command()
@click.argument("video", type=click.Path())
@click.option("-o", "--out", "out_csv", required=True,
              help="output landmark CSV path.")
@click.option("--video-id", default=None,
              help="video_id column value; defaults to the file stem.")
@click.option("--resize", type=int, default=256,
              help="uniform face-crop size for landmark prediction.")
@click.option("--crop-scale", type=float, default=2.0,
              help="search-crop size as a multiple of the last face box.")
@click.option("--reset-after", type=int, default=30,
              help="consecutive no-face frames before the track resets.")
@click.option("--two-eyes", is_flag=True,
              help="require two detected eyes instead of one.")
def main(video, out_csv, video_id, resize, crop_scale, reset_after, two_eyes):
    """Extract 68-point facial landmarks from VIDEO into a CSV."""
    cfg = ExtractConfig(resize=resize, crop_scale=crop_scale,
                        reset_after=reset_after, require_two_eyes=two_eyes)
    try:
        rows = extract_video(video, out_csv, video_id=video_id, cfg=cfg)
    except (UnreadableVideo, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"rows={rows} out={out_csv}")


if __name__ == "__main__":
    main()
