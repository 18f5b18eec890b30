/** Ordered single-flight request queue.
 *
 * All session mutations funnel through one queue so the service sees
 * them in interaction order; a failed request never blocks the ones
 * queued after it. `whenIdle` resolves once everything enqueued so far
 * has settled — the store uses it as its quiescence point.
 */

export class RequestQueue {
  private chain: Promise<void> = Promise.resolve();
  private inFlight = 0;

  get pending(): number {
    return this.inFlight;
  }

  enqueue<T>(task: () => Promise<T>): Promise<T> {
    this.inFlight += 1;
    const run = () => task();
    const result = this.chain.then(run, run);
    this.chain = result.then(
      () => {
        this.inFlight -= 1;
      },
      () => {
        this.inFlight -= 1;
      },
    );
    return result;
  }

  /** Resolves after every task enqueued before the call has settled. */
  whenIdle(): Promise<void> {
    return this.chain;
  }
}
