/**
 * Session client: one producer socket streaming synthesized input frames,
 * one consumer socket receiving broadcasts. The client never computes a
 * cursor position itself; what it renders is exactly what the server sent
 * (the cursor field below is only ever assigned from cursor broadcasts).
 *
 * Rendering is decoupled from ingestion by a frame-latest buffer: message
 * handlers overwrite "latest" slots, and the render loop samples them once
 * per frame. Click results are events rather than state, so they queue.
 */

import {
  ClickResultBody, CursorBody, StimulusBody, WireFrame, decodeFrame,
  encodeFrame, makeButton, makeHello, makePose, makeTouch, validateFrame,
} from "./protocol.js";

export interface Transport {
  send(text: string): void;
  close(): void;
  onMessage(handler: (text: string) => void): void;
  onClose(handler: () => void): void;
  onOpen(handler: () => void): void;
}

export type TransportFactory = (url: string) => Transport;

export type ConnectionState = "connecting" | "open" | "reconnecting" | "closed";

export interface SetStats {
  setIndex: number;
  hits: number;
  misses: number;
  /** seconds between successive on-target clicks (the live RT readout) */
  rts: number[];
}

export interface RenderState {
  cursor: CursorBody | null;
  stimulus: StimulusBody | null;
  flash: boolean;                  // target flashes red after a miss
  connection: ConnectionState;
  stats: SetStats;
  completed: boolean;
  clickEvents: ClickResultBody[];  // drained on every render() call
}

export interface ClientOptions {
  serverUrl: string;               // ws://host:port/ws
  sessionId: string;
  technique: string;
  sets?: { width_px: number; amplitude_px: number }[];
  transportFactory: TransportFactory;
  /** monotonic milliseconds; injectable for tests */
  now?: () => number;
  poseRateHz?: number;             // emission caps, defaults 90 / 60
  touchRateHz?: number;
  flashMs?: number;
  reconnectDelayMs?: number;
}

const POSE_RATE_DEFAULT = 90;
const TOUCH_RATE_DEFAULT = 60;

export class SessionClient {
  private readonly now: () => number;
  private readonly posePeriodMs: number;
  private readonly touchPeriodMs: number;
  private readonly flashMs: number;

  private producer: Transport | null = null;
  private consumer: Transport | null = null;
  private seq = 0;
  private t0Ms: number;
  private lastPoseMs = -Infinity;
  private lastPoseKey = "";
  private lastTouchMoveMs = -Infinity;
  private lastHitTUs: number | null = null;

  /** every frame actually written to the producer socket */
  readonly sentFrames: WireFrame[] = [];
  /** every cursor broadcast received, for audit/tests */
  readonly cursorLog: CursorBody[] = [];

  private latestCursor: CursorBody | null = null;
  private latestStimulus: StimulusBody | null = null;
  private clickQueue: ClickResultBody[] = [];
  private flashUntilMs = -Infinity;
  private connection: ConnectionState = "connecting";
  private completed = false;
  private stats: SetStats = { setIndex: 0, hits: 0, misses: 0, rts: [] };

  constructor(private readonly opts: ClientOptions) {
    this.now = opts.now ?? (() => performance.now());
    this.posePeriodMs = 1000 / (opts.poseRateHz ?? POSE_RATE_DEFAULT);
    this.touchPeriodMs = 1000 / (opts.touchRateHz ?? TOUCH_RATE_DEFAULT);
    this.flashMs = opts.flashMs ?? 250;
    this.t0Ms = this.now();
  }

  // ------------------------------------------------------------ connection

  connect(): void {
    this.connection = "connecting";
    this.openProducer();
    this.openConsumer();
  }

  private openProducer(): void {
    const t = this.opts.transportFactory(this.opts.serverUrl);
    this.producer = t;
    t.onOpen(() => {
      this.connection = "open";
      this.sendFrame(makeHello(this.opts.sessionId, this.nextSeq(),
                               this.tUs(), "producer", this.opts.technique,
                               this.opts.sets));
    });
    t.onClose(() => this.handleDrop());
  }

  private openConsumer(): void {
    const t = this.opts.transportFactory(this.opts.serverUrl);
    this.consumer = t;
    t.onOpen(() => {
      t.send(encodeFrame(makeHello(this.opts.sessionId, 1, this.tUs(),
                                   "consumer")));
    });
    t.onMessage((text) => this.ingest(text));
    t.onClose(() => this.handleDrop());
  }

  private handleDrop(): void {
    if (this.completed || this.connection === "closed") return;
    this.connection = "reconnecting";
    const delay = this.opts.reconnectDelayMs ?? 1000;
    setTimeout(() => {
      if (this.connection === "reconnecting") this.connect();
    }, delay);
  }

  close(): void {
    this.connection = "closed";
    this.producer?.close();
    this.consumer?.close();
  }

  get connectionState(): ConnectionState {
    return this.connection;
  }

  // ------------------------------------------------------------- emission

  private tUs(): number {
    return Math.round((this.now() - this.t0Ms) * 1000);
  }

  private nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  private sendFrame(frame: WireFrame): void {
    const error = validateFrame(frame);
    if (error !== null) {
      throw new Error(`refusing to send invalid frame: ${error}`);
    }
    this.producer?.send(encodeFrame(frame));
    this.sentFrames.push(frame);
  }

  /** Rate-limited to the pose rate; returns false when the sample was
   * coalesced away. */
  sendPose(matrix: number[], buttons = 0): boolean {
    const t = this.now();
    if (t - this.lastPoseMs < this.posePeriodMs) return false;
    this.lastPoseMs = t;
    this.lastPoseKey = `${matrix.join(",")}|${buttons}`;
    this.sendFrame(makePose(this.opts.sessionId, this.nextSeq(), this.tUs(),
                            matrix, buttons));
    return true;
  }

  /**
   * Event-driven pose emission for render loops: sends only when the pose
   * actually changed, or while the server is animating a snap-back or
   * waiting out the clutch (those timers advance on incoming events). An
   * idle client therefore emits nothing.
   */
  maybeSendPose(matrix: number[], buttons = 0): boolean {
    const key = `${matrix.join(",")}|${buttons}`;
    const mode = this.latestCursor?.mode;
    const animating = mode === "snapping" || mode === "clutch_wait";
    if (key === this.lastPoseKey && !animating) return false;
    return this.sendPose(matrix, buttons);
  }

  touchDown(xM: number, yM: number): void {
    this.sendFrame(makeTouch(this.opts.sessionId, this.nextSeq(), this.tUs(),
                             "down", xM, yM));
  }

  /** Rate-limited to the touch rate. */
  touchMove(xM: number, yM: number): boolean {
    const t = this.now();
    if (t - this.lastTouchMoveMs < this.touchPeriodMs) return false;
    this.lastTouchMoveMs = t;
    this.sendFrame(makeTouch(this.opts.sessionId, this.nextSeq(), this.tUs(),
                             "move", xM, yM));
    return true;
  }

  touchUp(xM: number, yM: number): void {
    this.sendFrame(makeTouch(this.opts.sessionId, this.nextSeq(), this.tUs(),
                             "up", xM, yM));
  }

  padPress(): void {
    this.sendFrame(makeButton(this.opts.sessionId, this.nextSeq(), this.tUs(),
                              "pad", "press"));
  }

  padRelease(): void {
    this.sendFrame(makeButton(this.opts.sessionId, this.nextSeq(), this.tUs(),
                              "pad", "release"));
  }

  triggerPress(): void {
    this.sendFrame(makeButton(this.opts.sessionId, this.nextSeq(), this.tUs(),
                              "trigger", "press"));
  }

  triggerRelease(): void {
    this.sendFrame(makeButton(this.opts.sessionId, this.nextSeq(), this.tUs(),
                              "trigger", "release"));
  }

  // ------------------------------------------------------------ ingestion

  private ingest(text: string): void {
    let frame: WireFrame;
    try {
      frame = decodeFrame(text);
    } catch {
      return;    // a broken broadcast must never take the console down
    }
    switch (frame.type) {
      case "cursor": {
        const body = frame.body as unknown as CursorBody;
        this.latestCursor = body;
        this.cursorLog.push(body);
        break;
      }
      case "stimulus": {
        const body = frame.body as unknown as StimulusBody;
        if (body.set_index !== this.stats.setIndex) {
          this.stats = { setIndex: body.set_index, hits: 0, misses: 0, rts: [] };
          this.lastHitTUs = null;
        }
        this.latestStimulus = body;
        break;
      }
      case "click_result": {
        const body = frame.body as unknown as ClickResultBody;
        this.clickQueue.push(body);
        if (body.hit) {
          this.stats.hits += 1;
          if (this.lastHitTUs !== null) {
            this.stats.rts.push((frame.t_us - this.lastHitTUs) / 1e6);
          }
          this.lastHitTUs = frame.t_us;
        } else {
          this.stats.misses += 1;
          this.flashUntilMs = this.now() + this.flashMs;
        }
        break;
      }
      case "session_control": {
        if ((frame.body as { action?: string }).action === "complete") {
          this.completed = true;
        }
        break;
      }
      default:
        break;
    }
  }

  /** Sample the frame-latest buffer; drains pending click events. */
  render(): RenderState {
    const clicks = this.clickQueue;
    this.clickQueue = [];
    return {
      cursor: this.latestCursor,
      stimulus: this.latestStimulus,
      flash: this.now() < this.flashUntilMs,
      connection: this.connection,
      stats: this.stats,
      completed: this.completed,
      clickEvents: clicks,
    };
  }

  get accuracy(): number | null {
    const total = this.stats.hits + this.stats.misses;
    return total === 0 ? null : this.stats.hits / total;
  }
}
