/** Labeling session state: a local queue of work items that advances only on
 * server acknowledgement, so the UI can never get ahead of the store. */

import { ApiClient, ApiError, TagValue, WorkItem } from "./api";

export interface ConflictNotice {
  item: WorkItem;
  detail: string;
}

export class Session {
  queue: WorkItem[] = [];
  submitted = 0;
  /** True while a label request is in flight; blocks duplicate submits. */
  pending = false;
  lastConflict: ConflictNotice | null = null;

  constructor(
    readonly api: ApiClient,
    readonly annotator: string,
  ) {}

  get current(): WorkItem | null {
    return this.queue.length > 0 ? this.queue[0] : null;
  }

  /** Fetch more unlabeled items for this annotator, appending to the queue. */
  async refill(limit = 10): Promise<number> {
    const items = await this.api.nextItems(this.annotator, limit);
    const known = new Set(this.queue.map((item) => item.item_id));
    const fresh = items.filter((item) => !known.has(item.item_id));
    this.queue.push(...fresh);
    return fresh.length;
  }

  /** Submit a tag for the current item. The queue advances only when the
   * server acknowledges the vote. A conflict (item already decided or this
   * annotator already voted) skips the item; any other failure keeps it at
   * the front so the user can retry. */
  async label(tag: TagValue): Promise<WorkItem | null> {
    const item = this.current;
    if (item === null || this.pending) return this.current;
    this.pending = true;
    try {
      await this.api.submitLabel(item.item_id, this.annotator, tag);
      this.queue.shift();
      this.submitted += 1;
      this.lastConflict = null;
    } catch (err) {
      if (err instanceof ApiError && err.conflict) {
        this.queue.shift();
        this.lastConflict = { item, detail: err.message };
      } else {
        throw err;
      }
    } finally {
      this.pending = false;
    }
    return this.current;
  }

  /** Move the current item to the back of the queue without voting. */
  skip(): WorkItem | null {
    if (this.queue.length > 1) {
      const item = this.queue.shift() as WorkItem;
      this.queue.push(item);
    }
    return this.current;
  }
}
